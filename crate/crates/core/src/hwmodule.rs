//! Integrable highest-weight modules `L(Lambda)` built degreewise by
//! Gram-rank pivoting on F-word images under the contravariant form.
//!
//! The maximal integrable quotient is never constructed through ideals or
//! Serre rewriting: a weight space is the span of F-word images modulo the
//! radical of the Shapovalov form, and its dimension is the Gram rank.
//! Freudenthal's recursion lives here as an independent multiplicity oracle.

use std::cell::RefCell;
use std::collections::{BTreeMap, HashMap};

use crate::arith::{qfact, LaurentPoly, RationalFunc};
use crate::cartan::{CartanDatum, DimVector, Weight, WeightAnchor};
use crate::error::{Error, Result};
use crate::falgebra::{FAlgebra, FlagWord};
use crate::linalg::Matrix;

/// A word in single F-letters; index 0 acts last.
pub type PlainWord = Vec<usize>;

/// Quantum integer for arbitrary sign: `[-n] = -[n]`.
pub fn qint_signed(n: i64) -> LaurentPoly {
    if n >= 0 {
        crate::arith::qint(n).unwrap()
    } else {
        crate::arith::qint(-n).unwrap().neg()
    }
}

/// One computed weight space `L(Lambda)_{Lambda - nu}`.
pub struct WeightSpace {
    pub nu: DimVector,
    /// All plain F-words of degree nu, lexicographic.
    pub words: Vec<PlainWord>,
    /// Shapovalov Gram matrix on all word images.
    pub gram: Matrix,
    pub pivots: Vec<usize>,
    pub pivot_gram: Matrix,
    /// word_in_pivots[w] = pivot coordinates of word image w.
    pub word_in_pivots: Vec<Vec<RationalFunc>>,
}

impl WeightSpace {
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }
}

/// An element of the module: per-degree coefficient vectors over the pivot
/// basis of each weight space.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct ModuleVector {
    pub coords: BTreeMap<DimVector, Vec<RationalFunc>>,
}

impl ModuleVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn add_component(&mut self, nu: &DimVector, k: usize, c: &RationalFunc, dim: usize) {
        if c.is_zero() {
            return;
        }
        let vec = self
            .coords
            .entry(nu.clone())
            .or_insert_with(|| vec![RationalFunc::zero(); dim]);
        vec[k] = vec[k].add(c);
        if vec.iter().all(|x| x.is_zero()) {
            self.coords.remove(nu);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (nu, vec) in &other.coords {
            for (k, c) in vec.iter().enumerate() {
                out.add_component(nu, k, c, vec.len());
            }
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
        ModuleVector {
            coords: self
                .coords
                .iter()
                .map(|(nu, vec)| (nu.clone(), vec.iter().map(|x| x.mul(c)).collect()))
                .collect(),
        }
    }

    /// Coefficientwise bar; pivot vectors are F-word images, hence bar-fixed.
    pub fn bar(&self) -> Self {
        ModuleVector {
            coords: self
                .coords
                .iter()
                .map(|(nu, vec)| (nu.clone(), vec.iter().map(|x| x.bar()).collect()))
                .collect(),
        }
    }
}

/// The integrable highest-weight module, computed inside a componentwise
/// depth box (optionally capped by total degree).
pub struct HWModule {
    datum: CartanDatum,
    highest: WeightAnchor,
    depth: DimVector,
    lowest_variant: bool,
    spaces: BTreeMap<DimVector, WeightSpace>,
    e_memo: RefCell<HashMap<(PlainWord, usize), Vec<(PlainWord, RationalFunc)>>>,
    shap_memo: RefCell<HashMap<(PlainWord, PlainWord), RationalFunc>>,
}

impl HWModule {
    pub fn build(datum: &CartanDatum, highest: &WeightAnchor, depth: &DimVector) -> Result<Self> {
        Self::build_with(datum, highest, depth, None, false)
    }

    pub fn build_with(
        datum: &CartanDatum,
        highest: &WeightAnchor,
        depth: &DimVector,
        tr_cap: Option<u32>,
        lowest_variant: bool,
    ) -> Result<Self> {
        if !highest.is_dominant() {
            return Err(Error::Config(format!(
                "highest weight {:?} is not dominant",
                highest.coords()
            )));
        }
        if highest.coords().len() != datum.rank() {
            return Err(Error::Config("weight rank does not match Cartan datum".into()));
        }
        let mut module = HWModule {
            datum: datum.clone(),
            highest: highest.clone(),
            depth: depth.clone(),
            lowest_variant,
            spaces: BTreeMap::new(),
            e_memo: RefCell::new(HashMap::new()),
            shap_memo: RefCell::new(HashMap::new()),
        };
        let mut degrees = depth.sub_degrees();
        if let Some(cap) = tr_cap {
            degrees.retain(|d| d.tr() <= cap);
        }
        for nu in degrees {
            let space = module.build_space(&nu)?;
            module.spaces.insert(nu, space);
        }
        Ok(module)
    }

    fn build_space(&self, nu: &DimVector) -> Result<WeightSpace> {
        let words = enumerate_plain_words(&self.datum, nu);
        let n = words.len();
        let mut gram = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..=i {
                let v = self.shap_plain(&words[i], &words[j]);
                *gram.at_mut(i, j) = v.clone();
                *gram.at_mut(j, i) = v;
            }
        }
        let mut pivots: Vec<usize> = Vec::new();
        for w in 0..n {
            let mut cand = pivots.clone();
            cand.push(w);
            let mut sub = Matrix::zeros(cand.len(), cand.len());
            for (a, &ia) in cand.iter().enumerate() {
                for (b, &ib) in cand.iter().enumerate() {
                    *sub.at_mut(a, b) = gram.at(ia, ib).clone();
                }
            }
            if sub.rank() == cand.len() {
                pivots = cand;
            }
        }
        if pivots.len() != gram.rank() {
            return Err(Error::Math(format!("pivot count disagrees with Gram rank at {nu:?}")));
        }
        let k = pivots.len();
        let mut pivot_gram = Matrix::zeros(k, k);
        for (a, &ia) in pivots.iter().enumerate() {
            for (b, &ib) in pivots.iter().enumerate() {
                *pivot_gram.at_mut(a, b) = gram.at(ia, ib).clone();
            }
        }
        let pivot_gram_inv = if k > 0 { Some(pivot_gram.invert()?) } else { None };
        let mut word_in_pivots = Vec::with_capacity(n);
        for w in 0..n {
            if k == 0 {
                word_in_pivots.push(vec![]);
                continue;
            }
            let rhs: Vec<RationalFunc> = pivots.iter().map(|&p| gram.at(p, w).clone()).collect();
            word_in_pivots.push(pivot_gram_inv.as_ref().unwrap().mul_vec(&rhs));
        }
        Ok(WeightSpace {
            nu: nu.clone(),
            words,
            gram,
            pivots,
            pivot_gram,
            word_in_pivots,
        })
    }

    pub fn datum(&self) -> &CartanDatum {
        &self.datum
    }

    pub fn highest_anchor(&self) -> &WeightAnchor {
        &self.highest
    }

    pub fn depth(&self) -> &DimVector {
        &self.depth
    }

    pub fn is_lowest_variant(&self) -> bool {
        self.lowest_variant
    }

    pub fn spaces(&self) -> impl Iterator<Item = (&DimVector, &WeightSpace)> {
        self.spaces.iter()
    }

    pub fn space(&self, nu: &DimVector) -> Option<&WeightSpace> {
        self.spaces.get(nu)
    }

    pub fn dim_at(&self, nu: &DimVector) -> usize {
        self.spaces.get(nu).map_or(0, |s| s.dim())
    }

    /// `<Lambda - nu, alpha_i^vee>`, sign-flipped for the lowest-weight
    /// variant.
    pub fn weight_pairing(&self, nu: &DimVector, i: usize) -> i64 {
        let w = Weight {
            anchor: self.highest.clone(),
            root_part: nu.clone(),
        };
        let p = w.pairing(&self.datum, i);
        if self.lowest_variant {
            -p
        } else {
            p
        }
    }

    pub fn highest_vector(&self) -> ModuleVector {
        let mut v = ModuleVector::zero();
        v.add_component(&DimVector::zero(), 0, &RationalFunc::one(), 1);
        v
    }

    pub fn basis_vector(&self, nu: &DimVector, k: usize) -> ModuleVector {
        let dim = self.dim_at(nu);
        assert!(k < dim);
        let mut v = ModuleVector::zero();
        v.add_component(nu, k, &RationalFunc::one(), dim);
        v
    }

    /// Image of a plain F-word on the highest-weight vector, in pivot
    /// coordinates.
    pub fn word_image(&self, word: &[usize]) -> Result<ModuleVector> {
        let mut nu = DimVector::zero();
        for &i in word {
            nu = nu.add_unit(i, 1);
        }
        let space = self.spaces.get(&nu).ok_or_else(|| {
            Error::Depth(format!("word degree {nu:?} outside the computed depth box"))
        })?;
        let idx = space
            .words
            .binary_search_by(|probe| probe.as_slice().cmp(word))
            .map_err(|_| Error::Math(format!("word {word:?} not enumerated at {nu:?}")))?;
        let mut v = ModuleVector::zero();
        for (k, c) in space.word_in_pivots[idx].iter().enumerate() {
            v.add_component(&nu, k, c, space.dim());
        }
        Ok(v)
    }

    /// Image of a divided-power word: plain image divided by `prod [a]!`.
    pub fn flag_word_image(&self, w: &FlagWord) -> Result<ModuleVector> {
        let img = self.word_image(&w.plain())?;
        Ok(img.scale(&w.plain_scalar()))
    }

    /// Lowering generator `F_i^{(n)}` (raising in the lowest-weight variant).
    pub fn act_f(&self, i: usize, n: u32, x: &ModuleVector) -> Result<ModuleVector> {
        if i >= self.datum.rank() {
            return Err(Error::Config(format!("unknown vertex {i}")));
        }
        if n == 0 {
            return Ok(x.clone());
        }
        let inv_fact = RationalFunc::new(LaurentPoly::one(), qfact(n as i64)?)?;
        let mut out = ModuleVector::zero();
        for (nu, vec) in &x.coords {
            let target = nu.add_unit(i, n);
            let tspace = match self.spaces.get(&target) {
                Some(s) => s,
                None => {
                    return Err(Error::Depth(format!(
                        "F_{i}^({n}) leaves the depth box from {nu:?}"
                    )))
                }
            };
            if tspace.dim() == 0 {
                continue;
            }
            let space = self.spaces.get(nu).expect("source space computed");
            for (k, c) in vec.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let word = &space.words[space.pivots[k]];
                let mut new_word = vec![i; n as usize];
                new_word.extend_from_slice(word);
                let idx = tspace
                    .words
                    .binary_search_by(|probe| probe.as_slice().cmp(new_word.as_slice()))
                    .map_err(|_| Error::Math("prepended word missing".into()))?;
                let scaled = c.mul(&inv_fact);
                for (kk, coord) in tspace.word_in_pivots[idx].iter().enumerate() {
                    out.add_component(&target, kk, &scaled.mul(coord), tspace.dim());
                }
            }
        }
        Ok(out)
    }

    /// Raising generator `E_i^{(n)}` (lowering in the lowest-weight variant).
    pub fn act_e(&self, i: usize, n: u32, x: &ModuleVector) -> Result<ModuleVector> {
        if i >= self.datum.rank() {
            return Err(Error::Config(format!("unknown vertex {i}")));
        }
        if n == 0 {
            return Ok(x.clone());
        }
        let mut out = ModuleVector::zero();
        let inv_fact = RationalFunc::new(LaurentPoly::one(), qfact(n as i64)?)?;
        for (nu, vec) in &x.coords {
            let space = self.spaces.get(nu).expect("source space computed");
            for (k, c) in vec.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                let word = space.words[space.pivots[k]].clone();
                // apply E_i n times to the word image
                let mut combo: Vec<(PlainWord, RationalFunc)> = vec![(word, c.mul(&inv_fact))];
                for _ in 0..n {
                    let mut next: HashMap<PlainWord, RationalFunc> = HashMap::new();
                    for (w, coef) in combo {
                        for (w2, c2) in self.e_apply(&w, i) {
                            let e = next.entry(w2).or_insert_with(RationalFunc::zero);
                            *e = e.add(&coef.mul(&c2));
                        }
                    }
                    combo = next.into_iter().filter(|(_, c)| !c.is_zero()).collect();
                }
                if combo.is_empty() {
                    continue;
                }
                let target = nu
                    .checked_sub(&DimVector::unit(i))
                    .and_then(|d| {
                        let mut d = d;
                        for _ in 1..n {
                            d = d.checked_sub(&DimVector::unit(i))?;
                        }
                        Some(d)
                    })
                    .expect("E lowered an existing letter");
                let tspace = self.spaces.get(&target).expect("downward-closed box");
                if tspace.dim() == 0 {
                    continue;
                }
                for (w, coef) in combo {
                    let idx = tspace
                        .words
                        .binary_search_by(|probe| probe.as_slice().cmp(w.as_slice()))
                        .map_err(|_| Error::Math("E-result word missing".into()))?;
                    for (kk, coord) in tspace.word_in_pivots[idx].iter().enumerate() {
                        out.add_component(&target, kk, &coef.mul(coord), tspace.dim());
                    }
                }
            }
        }
        Ok(out)
    }

    /// `K_i^{sign}`: scales each weight component by `v^{sign <lambda, alpha_i^vee>}`.
    pub fn act_k(&self, i: usize, sign: i64, x: &ModuleVector) -> Result<ModuleVector> {
        if i >= self.datum.rank() {
            return Err(Error::Config(format!("unknown vertex {i}")));
        }
        let mut out = ModuleVector::zero();
        for (nu, vec) in &x.coords {
            let p = self.weight_pairing(nu, i);
            let s = RationalFunc::v_pow(sign * p);
            for (k, c) in vec.iter().enumerate() {
                out.add_component(nu, k, &c.mul(&s), vec.len());
            }
        }
        Ok(out)
    }

    /// `E_i (F-word image)` as a combination of shorter word images, valid
    /// in the Verma module and hence in its integrable quotient.
    fn e_apply(&self, word: &[usize], i: usize) -> Vec<(PlainWord, RationalFunc)> {
        if word.is_empty() {
            return vec![];
        }
        let key = (word.to_vec(), i);
        if let Some(v) = self.e_memo.borrow().get(&key) {
            return v.clone();
        }
        let j = word[0];
        let rest = &word[1..];
        let mut acc: HashMap<PlainWord, RationalFunc> = HashMap::new();
        for (w, c) in self.e_apply(rest, i) {
            let mut full = vec![j];
            full.extend_from_slice(&w);
            let e = acc.entry(full).or_insert_with(RationalFunc::zero);
            *e = e.add(&c);
        }
        if j == i {
            // [E_i, F_i] acts on the weight of `rest` by [<lambda, alpha_i^vee>]
            let mut nu_rest = DimVector::zero();
            for &l in rest {
                nu_rest = nu_rest.add_unit(l, 1);
            }
            let w = Weight {
                anchor: self.highest.clone(),
                root_part: nu_rest,
            };
            let p = w.pairing(&self.datum, i);
            let scalar = RationalFunc::from_laurent(qint_signed(p));
            let e = acc.entry(rest.to_vec()).or_insert_with(RationalFunc::zero);
            *e = e.add(&scalar);
        }
        let mut out: Vec<(PlainWord, RationalFunc)> =
            acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        out.sort_by(|a, b| a.0.cmp(&b.0));
        self.e_memo.borrow_mut().insert(key, out.clone());
        out
    }

    /// Shapovalov form on plain word images, by peeling the first letter
    /// through the contravariance identity `(F_i x, y) = (x, v K_i^- E_i y)`.
    fn shap_plain(&self, x: &[usize], y: &[usize]) -> RationalFunc {
        if x.len() != y.len() {
            return RationalFunc::zero();
        }
        let mut dx = DimVector::zero();
        let mut dy = DimVector::zero();
        for &i in x {
            dx = dx.add_unit(i, 1);
        }
        for &i in y {
            dy = dy.add_unit(i, 1);
        }
        if dx != dy {
            return RationalFunc::zero();
        }
        if x.is_empty() {
            return RationalFunc::one();
        }
        let key = if x <= y {
            (x.to_vec(), y.to_vec())
        } else {
            (y.to_vec(), x.to_vec())
        };
        if let Some(v) = self.shap_memo.borrow().get(&key) {
            return v.clone();
        }
        let i = x[0];
        let rest = &x[1..];
        // E_i y lives at degree nu - alpha_i with weight pairing p
        let nu_minus = dy.checked_sub(&DimVector::unit(i)).expect("degree match");
        let w = Weight {
            anchor: self.highest.clone(),
            root_part: nu_minus,
        };
        let p = w.pairing(&self.datum, i);
        let scalar = RationalFunc::v_pow(1 - p);
        let mut acc = RationalFunc::zero();
        for (wy, cy) in self.e_apply(y, i) {
            let sub = self.shap_plain(rest, &wy);
            if !sub.is_zero() {
                acc = acc.add(&cy.mul(&sub));
            }
        }
        let result = scalar.mul(&acc);
        self.shap_memo.borrow_mut().insert(key, result.clone());
        result
    }

    /// Contravariant form on module vectors.
    pub fn shapovalov(&self, x: &ModuleVector, y: &ModuleVector) -> RationalFunc {
        let mut acc = RationalFunc::zero();
        for (nu, xv) in &x.coords {
            let Some(yv) = y.coords.get(nu) else { continue };
            let space = &self.spaces[nu];
            for (a, xa) in xv.iter().enumerate() {
                if xa.is_zero() {
                    continue;
                }
                for (b, yb) in yv.iter().enumerate() {
                    if yb.is_zero() {
                        continue;
                    }
                    acc = acc.add(&xa.mul(yb).mul(space.pivot_gram.at(a, b)));
                }
            }
        }
        acc
    }

    /// Factor canonical basis: images of the canonical basis of `f` where
    /// supported, otherwise the minuscule shortcut.
    pub fn factor_cb(&self, falg: &FAlgebra) -> Result<Vec<ModuleVector>> {
        let mut out: Vec<ModuleVector> = Vec::new();
        let degrees: Vec<DimVector> = {
            let mut ds: Vec<DimVector> = self.spaces.keys().cloned().collect();
            ds.sort_by_key(|d| (d.tr(), d.clone()));
            ds
        };
        let mut unsupported = false;
        for nu in &degrees {
            if self.dim_at(nu) == 0 {
                continue;
            }
            match falg.canonical_basis(nu) {
                Ok(cb) => {
                    for el in cb {
                        let mut img = ModuleVector::zero();
                        for (w, c) in &el.coords {
                            let term = self.flag_word_image(w)?.scale(c);
                            img = img.add(&term);
                        }
                        if img.is_zero() || out.contains(&img) {
                            continue;
                        }
                        if img.bar() != img {
                            return Err(Error::Math(format!(
                                "factor canonical basis element at {nu:?} is not bar-fixed"
                            )));
                        }
                        out.push(img);
                    }
                }
                Err(Error::Config(_)) => {
                    unsupported = true;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if unsupported {
            // minuscule shortcut: every weight space must be <= 1-dimensional
            out.clear();
            for nu in &degrees {
                let d = self.dim_at(nu);
                if d > 1 {
                    return Err(Error::Config(format!(
                        "canonical basis of f unavailable and weight space {nu:?} has dimension {d}"
                    )));
                }
                if d == 1 {
                    out.push(self.basis_vector(nu, 0));
                }
            }
        }
        // almost-orthonormality
        for (a, x) in out.iter().enumerate() {
            for (b, y) in out.iter().enumerate() {
                let val = self.shapovalov(x, y);
                let delta = if a == b { 1 } else { 0 };
                if !val.is_almost(delta, 40) {
                    return Err(Error::Math(format!(
                        "factor canonical basis is not almost orthonormal: ({a},{b}) = {val}"
                    )));
                }
            }
        }
        Ok(out)
    }

    /// JSON dump: dims table, pivot words, Gram matrices.
    pub fn to_json(&self) -> serde_json::Value {
        let mut spaces = Vec::new();
        for (nu, s) in &self.spaces {
            let mut m = serde_json::Map::new();
            m.insert("degree".into(), nu.to_json(&self.datum));
            m.insert("dim".into(), serde_json::Value::Number(s.dim().into()));
            m.insert(
                "pivot_words".into(),
                serde_json::Value::Array(
                    s.pivots
                        .iter()
                        .map(|&p| {
                            serde_json::Value::Array(
                                s.words[p]
                                    .iter()
                                    .map(|&i| serde_json::Value::Number(i.into()))
                                    .collect(),
                            )
                        })
                        .collect(),
                ),
            );
            m.insert(
                "gram".into(),
                serde_json::Value::Array(
                    (0..s.dim())
                        .map(|a| {
                            serde_json::Value::Array(
                                (0..s.dim()).map(|b| s.pivot_gram.at(a, b).to_json()).collect(),
                            )
                        })
                        .collect(),
                ),
            );
            spaces.push(serde_json::Value::Object(m));
        }
        let mut root = serde_json::Map::new();
        root.insert("cartan".into(), self.datum.to_json());
        root.insert("highest_weight".into(), self.highest.to_json());
        root.insert("depth".into(), self.depth.to_json(&self.datum));
        root.insert("weight_spaces".into(), serde_json::Value::Array(spaces));
        serde_json::Value::Object(root)
    }
}

/// All plain words of degree `nu`, lexicographic.
pub fn enumerate_plain_words(datum: &CartanDatum, nu: &DimVector) -> Vec<PlainWord> {
    let mut out = Vec::new();
    let mut prefix = Vec::new();
    fn rec(rank: usize, rest: &DimVector, prefix: &mut PlainWord, out: &mut Vec<PlainWord>) {
        if rest.is_zero() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..rank {
            if rest.get(i) > 0 {
                let mut next = rest.clone();
                next.set(i, rest.get(i) - 1);
                prefix.push(i);
                rec(rank, &next, prefix, out);
                prefix.pop();
            }
        }
    }
    rec(datum.rank(), nu, &mut prefix, &mut out);
    out
}

/// Weight multiplicities of `L(Lambda)` by Freudenthal's recursion, an
/// oracle independent of the Gram-rank construction.
pub fn freudenthal_dims(
    datum: &CartanDatum,
    highest: &WeightAnchor,
    depth: &DimVector,
) -> Result<BTreeMap<DimVector, u64>> {
    if !highest.is_dominant() {
        return Err(Error::Config("Freudenthal oracle requires a dominant weight".into()));
    }
    let roots = positive_roots(datum, depth)?;
    let mut dims: BTreeMap<DimVector, u64> = BTreeMap::new();
    let mut degrees = depth.sub_degrees();
    degrees.sort_by_key(|d| (d.tr(), d.clone()));
    // (mu, alpha_j) for mu = Lambda - kappa, as an integer
    let pair_root = |kappa: &DimVector, root: &DimVector| -> i64 {
        let mut acc = 0i64;
        for (j, c) in root.iter() {
            let mut p = highest.pairing(j);
            for (l, k) in kappa.iter() {
                p -= datum.cartan_entry(j, l) * (k as i64);
            }
            acc += (c as i64) * p;
        }
        acc
    };
    for nu in degrees {
        if nu.is_zero() {
            dims.insert(nu, 1);
            continue;
        }
        // denominator: (Lambda + lambda + 2 rho, nu) with lambda = Lambda - nu
        let mut denom = 0i64;
        for (j, c) in nu.iter() {
            let mut p = 2 * highest.pairing(j) + 2;
            for (l, k) in nu.iter() {
                p -= datum.cartan_entry(j, l) * (k as i64);
            }
            denom += (c as i64) * p;
        }
        let mut numer = 0i64;
        for alpha in &roots {
            let mut k = 1u32;
            loop {
                let mut step = alpha.clone();
                for _ in 1..k {
                    step = step.add(alpha);
                }
                let Some(mu_nu) = nu.checked_sub(&step) else { break };
                let m = dims.get(&mu_nu).copied().unwrap_or(0);
                if m > 0 {
                    // (lambda + k alpha, alpha) with lambda = Lambda - nu
                    let val = pair_root(&nu, alpha) + (k as i64) * datum.sym_form(alpha, alpha);
                    numer += 2 * (m as i64) * val;
                }
                k += 1;
            }
        }
        let m = if denom == 0 {
            if numer != 0 {
                return Err(Error::Math(format!("Freudenthal: zero denominator at {nu:?}")));
            }
            0
        } else {
            if numer % denom != 0 {
                return Err(Error::Math(format!(
                    "Freudenthal: non-integral multiplicity at {nu:?}: {numer}/{denom}"
                )));
            }
            let q = numer / denom;
            if q < 0 {
                return Err(Error::Math(format!("Freudenthal: negative multiplicity at {nu:?}")));
            }
            q as u64
        };
        if m > 0 {
            dims.insert(nu, m);
        }
    }
    Ok(dims)
}

/// Positive roots inside the depth box, by the standard string-closure
/// recursion on the symmetric form. Errors when the recursion would leave
/// the box, i.e. the box is too small to certify closure.
pub fn positive_roots(datum: &CartanDatum, depth: &DimVector) -> Result<Vec<DimVector>> {
    let mut roots: Vec<DimVector> = (0..datum.rank())
        .filter(|&i| depth.get(i) >= 1)
        .map(DimVector::unit)
        .collect();
    loop {
        let mut added = false;
        let snapshot = roots.clone();
        for beta in &snapshot {
            for i in 0..datum.rank() {
                let gamma = beta.add_unit(i, 1);
                if roots.contains(&gamma) {
                    continue;
                }
                // depth of the alpha_i-string below beta
                let mut p = 0i64;
                let mut down = beta.clone();
                while let Some(d) = down.checked_sub(&DimVector::unit(i)) {
                    if d.is_zero() || roots.contains(&d) {
                        p += 1;
                        down = d;
                    } else {
                        break;
                    }
                }
                let pairing: i64 = {
                    let mut acc = 0;
                    for (j, c) in beta.iter() {
                        acc += (c as i64) * datum.cartan_entry(i, j);
                    }
                    acc
                };
                if p - pairing > 0 {
                    if !gamma.leq(depth) {
                        return Err(Error::Config(format!(
                            "depth box too small to close the root recursion (root {gamma:?} escapes)"
                        )));
                    }
                    roots.push(gamma);
                    added = true;
                }
            }
        }
        if !added {
            break;
        }
    }
    roots.sort_by_key(|r| (r.tr(), r.clone()));
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a1_module(n: i64, depth: u32) -> HWModule {
        HWModule::build(
            &CartanDatum::a1(),
            &WeightAnchor::new(vec![n]),
            &DimVector::from_coords(&[depth]),
        )
        .unwrap()
    }

    #[test]
    fn a1_fundamental_dims() {
        let m = a1_module(1, 2);
        assert_eq!(m.dim_at(&DimVector::zero()), 1);
        assert_eq!(m.dim_at(&DimVector::from_coords(&[1])), 1);
        assert_eq!(m.dim_at(&DimVector::from_coords(&[2])), 0);
    }

    #[test]
    fn a2_adjoint_dims() {
        let m = HWModule::build(
            &CartanDatum::a2(),
            &WeightAnchor::new(vec![1, 1]),
            &DimVector::from_coords(&[2, 2]),
        )
        .unwrap();
        assert_eq!(m.dim_at(&DimVector::from_coords(&[1, 1])), 2);
        assert_eq!(m.dim_at(&DimVector::from_coords(&[2, 2])), 1);
        let total: usize = m.spaces().map(|(_, s)| s.dim()).sum();
        assert_eq!(total, 8);
    }

    #[test]
    fn ef_commutator_on_f() {
        // A1, Lambda = omega: E F v = [1] v = v
        let m = a1_module(1, 2);
        let fv = m.act_f(0, 1, &m.highest_vector()).unwrap();
        let efv = m.act_e(0, 1, &fv).unwrap();
        assert_eq!(efv, m.highest_vector());
        // F^(2) kills the 2-dimensional module
        let f2 = m.act_f(0, 2, &m.highest_vector()).unwrap();
        assert!(f2.is_zero());
    }

    #[test]
    fn divided_power_e() {
        // A1, Lambda = 2 omega: E F^(2) v = F v
        let m = a1_module(2, 3);
        let f2 = m.act_f(0, 2, &m.highest_vector()).unwrap();
        let ef2 = m.act_e(0, 1, &f2).unwrap();
        let fv = m.act_f(0, 1, &m.highest_vector()).unwrap();
        assert_eq!(ef2, fv);
    }

    #[test]
    fn shapovalov_values() {
        let m = a1_module(1, 2);
        let v = m.highest_vector();
        assert!(m.shapovalov(&v, &v).is_one());
        let fv = m.act_f(0, 1, &v).unwrap();
        assert!(m.shapovalov(&fv, &fv).is_one());
        assert!(m.shapovalov(&v, &fv).is_zero());
    }

    #[test]
    fn act_k_scalars() {
        let m = a1_module(1, 2);
        let v = m.highest_vector();
        assert_eq!(m.act_k(0, 1, &v).unwrap(), v.scale(&RationalFunc::v_pow(1)));
        let fv = m.act_f(0, 1, &v).unwrap();
        assert_eq!(m.act_k(0, 1, &fv).unwrap(), fv.scale(&RationalFunc::v_pow(-1)));
        assert_eq!(m.act_k(0, -1, &fv).unwrap(), fv.scale(&RationalFunc::v_pow(1)));
    }

    #[test]
    fn bar_module_involution() {
        let m = a1_module(1, 2);
        let fv = m.act_f(0, 1, &m.highest_vector()).unwrap();
        let x = fv.scale(&RationalFunc::v_pow(1));
        assert_eq!(x.bar(), fv.scale(&RationalFunc::v_pow(-1)));
        assert_eq!(x.bar().bar(), x);
        assert_eq!(fv.bar(), fv);
    }

    #[test]
    fn depth_error_on_act_f() {
        let m = a1_module(3, 2);
        let f2 = m.act_f(0, 2, &m.highest_vector()).unwrap();
        assert!(!f2.is_zero());
        assert!(matches!(m.act_f(0, 1, &f2), Err(Error::Depth(_))));
    }

    #[test]
    fn freudenthal_oracle() {
        let d = freudenthal_dims(
            &CartanDatum::a1(),
            &WeightAnchor::new(vec![1]),
            &DimVector::from_coords(&[3]),
        )
        .unwrap();
        assert_eq!(d.get(&DimVector::zero()), Some(&1));
        assert_eq!(d.get(&DimVector::from_coords(&[1])), Some(&1));
        assert_eq!(d.get(&DimVector::from_coords(&[2])), None);

        let d = freudenthal_dims(
            &CartanDatum::a2(),
            &WeightAnchor::new(vec![1, 1]),
            &DimVector::from_coords(&[2, 2]),
        )
        .unwrap();
        assert_eq!(d.get(&DimVector::from_coords(&[1, 1])), Some(&2));
        let total: u64 = d.values().sum();
        assert_eq!(total, 8);
    }

    #[test]
    fn dims_match_freudenthal() {
        for (datum, hw, depth) in [
            (CartanDatum::a1(), vec![3], vec![4]),
            (CartanDatum::a2(), vec![1, 0], vec![2, 2]),
            (CartanDatum::a2(), vec![1, 1], vec![2, 2]),
            (CartanDatum::a1xa1(), vec![1, 1], vec![2, 2]),
        ] {
            let datum = datum;
            let anchor = WeightAnchor::new(hw);
            let depth = DimVector::from_coords(&depth);
            let m = HWModule::build(&datum, &anchor, &depth).unwrap();
            let oracle = freudenthal_dims(&datum, &anchor, &depth).unwrap();
            for (nu, s) in m.spaces() {
                assert_eq!(
                    s.dim() as u64,
                    oracle.get(nu).copied().unwrap_or(0),
                    "dimension mismatch at {nu:?}"
                );
            }
        }
    }

    #[test]
    fn factor_cb_a1() {
        let falg = FAlgebra::new(CartanDatum::a1());
        let m = a1_module(2, 3);
        let cb = m.factor_cb(&falg).unwrap();
        assert_eq!(cb.len(), 3);
        // {F^(k) v : 0 <= k <= 2}
        let v = m.highest_vector();
        assert_eq!(cb[0], v);
        assert_eq!(cb[1], m.act_f(0, 1, &v).unwrap());
        assert_eq!(cb[2], m.act_f(0, 2, &v).unwrap());
    }

    #[test]
    fn factor_cb_minuscule_a3() {
        // A3 natural representation: canonical basis of f unsupported,
        // but every weight space is 1-dimensional.
        let datum = CartanDatum::a_n(3);
        let falg = FAlgebra::new(datum.clone());
        let m = HWModule::build(
            &datum,
            &WeightAnchor::new(vec![1, 0, 0]),
            &DimVector::from_coords(&[1, 1, 1]),
        )
        .unwrap();
        let cb = m.factor_cb(&falg).unwrap();
        assert_eq!(cb.len(), 4);
    }

    #[test]
    fn factor_cb_a2_adjoint() {
        let datum = CartanDatum::a2();
        let falg = FAlgebra::new(datum.clone());
        let m = HWModule::build(
            &datum,
            &WeightAnchor::new(vec![1, 1]),
            &DimVector::from_coords(&[2, 2]),
        )
        .unwrap();
        let cb = m.factor_cb(&falg).unwrap();
        assert_eq!(cb.len(), 8);
        let at_11: Vec<_> = cb
            .iter()
            .filter(|b| b.coords.keys().any(|nu| *nu == DimVector::from_coords(&[1, 1])))
            .collect();
        assert_eq!(at_11.len(), 2);
    }

    #[test]
    fn lowest_variant_swaps_roles() {
        let m = HWModule::build_with(
            &CartanDatum::a1(),
            &WeightAnchor::new(vec![1]),
            &DimVector::from_coords(&[2]),
            None,
            true,
        )
        .unwrap();
        let v = m.highest_vector();
        // K pairs with the *lowest* weight: <-omega, alpha^vee> = -1
        assert_eq!(m.act_k(0, 1, &v).unwrap(), v.scale(&RationalFunc::v_pow(-1)));
    }
}
