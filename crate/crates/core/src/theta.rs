//! The quasi-R-matrix Theta, computed degreewise from dual bases of f,
//! its convolution inverse, an independent intertwiner-solving oracle,
//! and application to tensor vectors.
//!
//! Convention, pinned by the intertwiner oracle rather than assumed:
//! Theta_nu = (-1)^{tr nu} v^{tr nu} sum_k pivot_k^- (x) dual_k^+.

use std::collections::BTreeMap;
use std::rc::Rc;

use num_bigint::BigInt;

use crate::arith::{LaurentPoly, RationalFunc};
use crate::cartan::{DimVector, WeightAnchor};
use crate::error::{Error, Result};
use crate::falgebra::{FAlgebra, FElement};
use crate::hwmodule::HWModule;
use crate::linalg::Matrix;
use crate::tensorcb::{TensorModule, TensorVector};

/// One graded component of Theta: a sum of `minus (x) plus` terms, both
/// parts of the same degree, scalars folded into the terms.
#[derive(Clone, Debug)]
pub struct ThetaComponent {
    pub degree: DimVector,
    pub terms: Vec<(FElement, FElement)>,
}

impl ThetaComponent {
    pub fn identity() -> Self {
        ThetaComponent {
            degree: DimVector::zero(),
            terms: vec![(FElement::unit(), FElement::unit())],
        }
    }
}

fn sign_scalar(nu: &DimVector) -> RationalFunc {
    let tr = nu.tr() as i64;
    let sign = if tr % 2 == 0 { 1 } else { -1 };
    RationalFunc::from_laurent(LaurentPoly::monomial(tr, BigInt::from(sign)))
}

/// Theta_nu from the canonical pairing: pivots against their duals.
pub fn theta(falg: &FAlgebra, nu: &DimVector) -> Result<ThetaComponent> {
    if nu.is_zero() {
        return Ok(ThetaComponent::identity());
    }
    let basis = falg.basis_and_gram(nu)?;
    let duals = falg.dual_basis(nu)?;
    let scalar = sign_scalar(nu);
    let terms = (0..basis.dim())
        .map(|k| {
            (
                FElement::word(basis.pivot_word(k).clone()).scale(&scalar),
                duals[k].clone(),
            )
        })
        .collect();
    Ok(ThetaComponent {
        degree: nu.clone(),
        terms,
    })
}

/// Theta_nu computed from an arbitrary basis of `f_nu` (basis-independence
/// harness): the canonical element of the pairing in the given basis.
pub fn theta_from_basis(falg: &FAlgebra, nu: &DimVector, basis: &[FElement]) -> Result<ThetaComponent> {
    if nu.is_zero() {
        return Ok(ThetaComponent::identity());
    }
    let d = falg.dim(nu)?;
    if basis.len() != d {
        return Err(Error::Math(format!(
            "basis of size {} for a {d}-dimensional component",
            basis.len()
        )));
    }
    let mut gram = Matrix::zeros(d, d);
    for j in 0..d {
        for k in 0..d {
            *gram.at_mut(j, k) = falg.form(&basis[j], &basis[k]);
        }
    }
    let inv = gram.invert()?;
    let scalar = sign_scalar(nu);
    let mut terms = Vec::with_capacity(d);
    for j in 0..d {
        let mut dual = FElement::zero(nu.clone());
        for k in 0..d {
            if !inv.at(k, j).is_zero() {
                dual = dual.add(&basis[k].scale(inv.at(k, j)));
            }
        }
        terms.push((basis[j].scale(&scalar), dual));
    }
    Ok(ThetaComponent {
        degree: nu.clone(),
        terms,
    })
}

/// Pivot (x) pivot coordinate matrix of a component; the canonical
/// basis-free fingerprint used for equality tests.
pub fn component_matrix(falg: &FAlgebra, comp: &ThetaComponent) -> Result<Matrix> {
    let d = falg.dim(&comp.degree)?;
    let mut m = Matrix::zeros(d, d);
    for (minus, plus) in &comp.terms {
        let mc = falg.in_pivot_coords(minus)?;
        let pc = falg.in_pivot_coords(plus)?;
        for (a, ma) in mc.iter().enumerate() {
            if ma.is_zero() {
                continue;
            }
            for (b, pb) in pc.iter().enumerate() {
                if pb.is_zero() {
                    continue;
                }
                *m.at_mut(a, b) = m.at(a, b).add(&ma.mul(pb));
            }
        }
    }
    Ok(m)
}

/// Rewrite a component with one term per nonzero pivot row; also the
/// compaction step of the inverse recursion.
pub fn normalize_component(falg: &FAlgebra, comp: &ThetaComponent) -> Result<ThetaComponent> {
    let m = component_matrix(falg, comp)?;
    let basis = falg.basis_and_gram(&comp.degree)?;
    let d = basis.dim();
    let mut terms = Vec::new();
    for a in 0..d {
        let mut plus = FElement::zero(comp.degree.clone());
        for b in 0..d {
            if !m.at(a, b).is_zero() {
                plus.add_term(basis.pivot_word(b).clone(), m.at(a, b).clone());
            }
        }
        if !plus.is_zero() {
            terms.push((FElement::word(basis.pivot_word(a).clone()), plus));
        }
    }
    Ok(ThetaComponent {
        degree: comp.degree.clone(),
        terms,
    })
}

/// All components Theta_nu for `nu <= max` componentwise, sorted by
/// (tr, lex); this is the shape apply_theta expects.
pub fn theta_components_upto(falg: &FAlgebra, max: &DimVector) -> Result<Vec<ThetaComponent>> {
    max.sub_degrees().iter().map(|nu| theta(falg, nu)).collect()
}

/// Components of Theta^-1 from the convolution recursion
/// `sum_{mu + tau = nu} Theta_mu * Thetainv_tau = delta_{nu,0}`,
/// with componentwise products in U^- and U^+.
pub fn theta_inverse_upto(falg: &FAlgebra, max: &DimVector) -> Result<Vec<ThetaComponent>> {
    let mut inv: BTreeMap<DimVector, ThetaComponent> = BTreeMap::new();
    let mut out = Vec::new();
    for nu in max.sub_degrees() {
        let comp = if nu.is_zero() {
            ThetaComponent::identity()
        } else {
            let mut terms: Vec<(FElement, FElement)> = Vec::new();
            for mu in nu.sub_degrees() {
                if mu.is_zero() {
                    continue;
                }
                let tau = nu.checked_sub(&mu).expect("sub-degree");
                let th = theta(falg, &mu)?;
                let lower = &inv[&tau];
                for (a, b) in &th.terms {
                    for (c, d) in &lower.terms {
                        terms.push((
                            a.concat(c).scale(&RationalFunc::from_int(-1)),
                            b.concat(d),
                        ));
                    }
                }
            }
            normalize_component(
                falg,
                &ThetaComponent {
                    degree: nu.clone(),
                    terms,
                },
            )?
        };
        inv.insert(nu.clone(), comp.clone());
        out.push(comp);
    }
    Ok(out)
}

pub fn theta_inverse(falg: &FAlgebra, nu: &DimVector) -> Result<ThetaComponent> {
    let all = theta_inverse_upto(falg, nu)?;
    Ok(all.into_iter().last().expect("at least the zero component"))
}

/// Apply one `minus (x) plus` term: the plus part (E-letters) on the last
/// factor, the minus part (F-letters) on the first N-1 factors through the
/// iterated coproduct.
pub fn apply_term(
    tm: &TensorModule,
    minus: &FElement,
    plus: &FElement,
    x: &TensorVector,
) -> Result<TensorVector> {
    let n = tm.n_factors();
    if n < 2 {
        return Err(Error::Config("Theta application needs at least two factors".into()));
    }
    let last = n - 1;
    // plus part, factor-local on the last factor
    let mut mid = TensorVector::zero();
    for (w, c) in &plus.coords {
        let mut y = x.scale(c);
        for &(i, a) in w.letters().iter().rev() {
            for _ in 0..a {
                y = tm.act_e_at(last, i, &y)?;
            }
            if a > 1 {
                y = y.scale(&RationalFunc::new(
                    LaurentPoly::one(),
                    crate::arith::qfact(a as i64)?,
                )?);
            }
        }
        mid = mid.add(&y);
    }
    if mid.is_zero() {
        return Ok(mid);
    }
    // minus part on the prefix
    let mut out = TensorVector::zero();
    for (w, c) in &minus.coords {
        let mut y = mid.scale(c);
        for &(i, a) in w.letters().iter().rev() {
            y = tm.act_f_dp_prefix(i, a, last, &y)?;
        }
        out = out.add(&y);
    }
    Ok(out)
}

/// Apply `sum_nu Theta_nu` (the given components) to a tensor vector.
pub fn apply_theta(
    tm: &TensorModule,
    comps: &[ThetaComponent],
    x: &TensorVector,
) -> Result<TensorVector> {
    let mut out = TensorVector::zero();
    for comp in comps {
        for (minus, plus) in &comp.terms {
            out = out.add(&apply_term(tm, minus, plus, x)?);
        }
    }
    Ok(out)
}

/// Two-factor bar-conjugated coproducts, needed only by the oracle:
/// barDelta(E_i) = E (x) 1 + K^-1 (x) E, barDelta(F_i) = F (x) K + 1 (x) F.
fn bar_act_e(tm: &TensorModule, i: usize, x: &TensorVector) -> Result<TensorVector> {
    let t1 = tm.act_e_at(0, i, x)?;
    let t2 = tm.act_e_at(1, i, &tm.scale_by_factor_weight(0, i, -1, x))?;
    Ok(t1.add(&t2))
}

fn bar_act_f(tm: &TensorModule, i: usize, x: &TensorVector) -> Result<TensorVector> {
    let t1 = tm.scale_by_factor_weight(1, i, 1, &tm.act_f_at(0, i, x)?);
    let t2 = tm.act_f_at(1, i, x)?;
    Ok(t1.add(&t2))
}

/// Solve `Delta(u) Theta = Theta barDelta(u)` degreewise on probe modules:
/// an oracle fully independent of the dual-basis construction. Probe depth
/// (the highest weight of the probe) escalates until the system is
/// determined.
pub fn theta_by_intertwiner(falg: &Rc<FAlgebra>, nu: &DimVector) -> Result<ThetaComponent> {
    let mut map = theta_by_intertwiner_many(falg, std::slice::from_ref(nu))?;
    Ok(map.remove(nu).expect("requested degree solved"))
}

/// Intertwiner-solved components for every sub-degree of every requested
/// degree, each solved exactly once.
pub fn theta_by_intertwiner_many(
    falg: &Rc<FAlgebra>,
    degrees: &[DimVector],
) -> Result<BTreeMap<DimVector, ThetaComponent>> {
    let mut wanted: Vec<DimVector> = degrees
        .iter()
        .flat_map(|d| d.sub_degrees())
        .collect();
    wanted.sort_by_key(|d| (d.tr(), d.clone()));
    wanted.dedup();
    let mut cache: BTreeMap<DimVector, ThetaComponent> = BTreeMap::new();
    for d in wanted {
        let comp = if d.is_zero() {
            ThetaComponent::identity()
        } else {
            let known: Vec<ThetaComponent> = d
                .sub_degrees()
                .into_iter()
                .filter(|s| *s != d)
                .map(|s| cache.get(&s).expect("sub-degree solved first").clone())
                .collect();
            solve_component(falg, &d, &known)?
        };
        cache.insert(d, comp);
    }
    Ok(cache)
}

/// Jordan-reduced accumulator for the probe equations. Rows carry the
/// right-hand side in the last slot; absorbing stops contributing once the
/// unknowns are pinned, so most probe equations are never materialized.
struct ProbeSolver {
    n: usize,
    rows: Vec<Vec<RationalFunc>>,
    pivots: Vec<usize>,
}

impl ProbeSolver {
    fn new(n: usize) -> Self {
        ProbeSolver {
            n,
            rows: Vec::new(),
            pivots: Vec::new(),
        }
    }

    fn absorb(&mut self, mut row: Vec<RationalFunc>) -> Result<()> {
        debug_assert_eq!(row.len(), self.n + 1);
        for (r, &c) in self.pivots.iter().enumerate() {
            if !row[c].is_zero() {
                let f = row[c].clone();
                for j in 0..=self.n {
                    if !self.rows[r][j].is_zero() {
                        row[j] = row[j].sub(&f.mul(&self.rows[r][j]));
                    }
                }
            }
        }
        let Some(c) = (0..self.n).find(|&j| !row[j].is_zero()) else {
            if row[self.n].is_zero() {
                return Ok(());
            }
            return Err(Error::Math(
                "intertwiner system inconsistent: convention mismatch".into(),
            ));
        };
        let inv = row[c].inv().expect("nonzero pivot");
        for j in 0..=self.n {
            if !row[j].is_zero() {
                row[j] = row[j].mul(&inv);
            }
        }
        for existing in self.rows.iter_mut() {
            if !existing[c].is_zero() {
                let f = existing[c].clone();
                for j in 0..=self.n {
                    if !row[j].is_zero() {
                        existing[j] = existing[j].sub(&f.mul(&row[j]));
                    }
                }
            }
        }
        self.rows.push(row);
        self.pivots.push(c);
        Ok(())
    }

    fn complete(&self) -> bool {
        self.pivots.len() == self.n
    }

    fn solution(&self) -> Vec<RationalFunc> {
        let mut x = vec![RationalFunc::zero(); self.n];
        for (r, &c) in self.pivots.iter().enumerate() {
            x[c] = self.rows[r][self.n].clone();
        }
        x
    }
}

fn solve_component(
    falg: &Rc<FAlgebra>,
    d: &DimVector,
    known: &[ThetaComponent],
) -> Result<ThetaComponent> {
    let datum = falg.datum().clone();
    let rank = datum.rank();
    let basis = falg.basis_and_gram(d)?;
    let dim = basis.dim();
    let ones = DimVector::from_coords(&vec![1u32; rank]);
    let box1 = d.add(&ones);
    let c_start = (box1.iter().map(|(_, c)| c).max().unwrap_or(1) + 1) as i64;
    for c in c_start..(c_start + 6) {
        let anchor = WeightAnchor::new(vec![c; rank]);
        let m1 = Rc::new(HWModule::build(&datum, &anchor, &box1)?);
        let m2 = Rc::new(HWModule::build(&datum, &anchor, d)?);
        let tm = TensorModule::new(falg.clone(), vec![m1, m2.clone()])?;
        // unknown term applicators: T_ab = pivot_a^- (x) pivot_b^+
        let unknowns: Vec<(FElement, FElement)> = {
            let mut u = Vec::new();
            for a in 0..dim {
                for b in 0..dim {
                    u.push((
                        FElement::word(basis.pivot_word(a).clone()),
                        FElement::word(basis.pivot_word(b).clone()),
                    ));
                }
            }
            u
        };
        let mut solver = ProbeSolver::new(dim * dim);
        let push_equation =
            |solver: &mut ProbeSolver, lin: &[TensorVector], konst: &TensorVector| -> Result<()> {
                let mut keys: Vec<_> = konst.coords.keys().cloned().collect();
                for l in lin {
                    keys.extend(l.coords.keys().cloned());
                }
                keys.sort();
                keys.dedup();
                for key in keys {
                    let mut row: Vec<RationalFunc> = lin
                        .iter()
                        .map(|l| l.coords.get(&key).cloned().unwrap_or_else(RationalFunc::zero))
                        .collect();
                    let k = konst
                        .coords
                        .get(&key)
                        .cloned()
                        .unwrap_or_else(RationalFunc::zero);
                    row.push(k.neg());
                    solver.absorb(row).map_err(|_| {
                        Error::Math(format!(
                            "intertwiner system inconsistent at {d:?}: convention mismatch"
                        ))
                    })?;
                    if solver.complete() {
                        break;
                    }
                }
                Ok(())
            };
        let top = (DimVector::zero(), 0usize);
        'probes: for i in 0..rank {
            // E_i equations, probes at second-factor degree d
            if let Some(space) = m2.space(d) {
                for k in 0..space.dim() {
                    if solver.complete() {
                        break 'probes;
                    }
                    let x = TensorVector::unit(vec![top.clone(), (d.clone(), k)]);
                    let known_theta_x = apply_theta(&tm, known, &x)?;
                    let rhs_vec = apply_theta(&tm, known, &bar_act_e(&tm, i, &x)?)?;
                    let konst = tm.act_e_single(i, &known_theta_x)?.sub(&rhs_vec);
                    let lin: Vec<TensorVector> = unknowns
                        .iter()
                        .map(|(mi, pl)| {
                            let t = apply_term(&tm, mi, pl, &x)?;
                            tm.act_e_single(i, &t)
                        })
                        .collect::<Result<_>>()?;
                    push_equation(&mut solver, &lin, &konst)?;
                }
            }
            // F_i equations, probes at second-factor degree d - alpha_i
            let Some(dm) = d.checked_sub(&DimVector::unit(i)) else { continue };
            if let Some(space) = m2.space(&dm) {
                for k in 0..space.dim() {
                    if solver.complete() {
                        break 'probes;
                    }
                    let x = TensorVector::unit(vec![top.clone(), (dm.clone(), k)]);
                    let lhs = tm.act_f_single(i, &apply_theta(&tm, known, &x)?)?;
                    let bar_fx = bar_act_f(&tm, i, &x)?;
                    let rhs_known = apply_theta(&tm, known, &bar_fx)?;
                    let konst = lhs.sub(&rhs_known);
                    let lin: Vec<TensorVector> = unknowns
                        .iter()
                        .map(|(mi, pl)| {
                            Ok(apply_term(&tm, mi, pl, &bar_fx)?
                                .scale(&RationalFunc::from_int(-1)))
                        })
                        .collect::<Result<_>>()?;
                    push_equation(&mut solver, &lin, &konst)?;
                }
            }
        }
        if !solver.complete() {
            continue;
        }
        let t = solver.solution();
        let mut terms = Vec::new();
        for a_idx in 0..dim {
            let mut plus = FElement::zero(d.clone());
            for b_idx in 0..dim {
                let val = &t[a_idx * dim + b_idx];
                if !val.is_zero() {
                    plus.add_term(basis.pivot_word(b_idx).clone(), val.clone());
                }
            }
            if !plus.is_zero() {
                terms.push((FElement::word(basis.pivot_word(a_idx).clone()), plus));
            }
        }
        return Ok(ThetaComponent {
            degree: d.clone(),
            terms,
        });
    }
    Err(Error::Depth(format!(
        "intertwiner system underdetermined at {d:?}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cartan::CartanDatum;

    fn a1_falg() -> Rc<FAlgebra> {
        Rc::new(FAlgebra::new(CartanDatum::a1()))
    }

    #[test]
    fn theta_zero_is_identity() {
        let falg = a1_falg();
        let t = theta(&falg, &DimVector::zero()).unwrap();
        assert_eq!(t.terms.len(), 1);
        assert!(t.terms[0].0.coords.values().next().unwrap().is_one());
    }

    #[test]
    fn theta_alpha_a1() {
        // (v^-1 - v) F (x) E
        let falg = a1_falg();
        let t = theta(&falg, &DimVector::from_coords(&[1])).unwrap();
        let m = component_matrix(&falg, &t).unwrap();
        let expect = RationalFunc::v_pow(-1).sub(&RationalFunc::v_pow(1));
        assert_eq!(*m.at(0, 0), expect);
    }

    #[test]
    fn theta_inverse_alpha_a1() {
        let falg = a1_falg();
        let t = theta_inverse(&falg, &DimVector::from_coords(&[1])).unwrap();
        let m = component_matrix(&falg, &t).unwrap();
        let expect = RationalFunc::v_pow(1).sub(&RationalFunc::v_pow(-1));
        assert_eq!(*m.at(0, 0), expect);
    }

    #[test]
    fn convolution_vanishes() {
        // sum_{mu+tau=nu} Theta_mu Thetainv_tau = 0 for nu != 0
        for datum in [CartanDatum::a1(), CartanDatum::a2()] {
            let falg = Rc::new(FAlgebra::new(datum.clone()));
            let max = DimVector::from_coords(&vec![2u32; datum.rank()]);
            let inv = theta_inverse_upto(&falg, &max).unwrap();
            let inv_map: BTreeMap<DimVector, ThetaComponent> =
                inv.into_iter().map(|c| (c.degree.clone(), c)).collect();
            for nu in max.sub_degrees() {
                if nu.is_zero() {
                    continue;
                }
                let mut terms = Vec::new();
                for mu in nu.sub_degrees() {
                    let tau = nu.checked_sub(&mu).unwrap();
                    let th = theta(&falg, &mu).unwrap();
                    for (a, b) in &th.terms {
                        for (c, d) in &inv_map[&tau].terms {
                            terms.push((a.concat(c), b.concat(d)));
                        }
                    }
                }
                let total = ThetaComponent {
                    degree: nu.clone(),
                    terms,
                };
                let m = component_matrix(&falg, &total).unwrap();
                let d = falg.dim(&nu).unwrap();
                for a in 0..d {
                    for b in 0..d {
                        assert!(m.at(a, b).is_zero(), "residual at {nu:?}");
                    }
                }
            }
        }
    }

    #[test]
    fn basis_independence() {
        let falg = Rc::new(FAlgebra::new(CartanDatum::a2()));
        let nu = DimVector::from_coords(&[1, 1]);
        let reference = component_matrix(&falg, &theta(&falg, &nu).unwrap()).unwrap();
        // a genuinely different basis: b1, b1 + v b2
        let basis = falg.basis_and_gram(&nu).unwrap();
        let b1 = FElement::word(basis.pivot_word(0).clone());
        let b2 = FElement::word(basis.pivot_word(1).clone());
        let mixed = vec![b1.clone(), b1.add(&b2.scale(&RationalFunc::v_pow(1)))];
        let other = component_matrix(&falg, &theta_from_basis(&falg, &nu, &mixed).unwrap()).unwrap();
        let d = falg.dim(&nu).unwrap();
        for a in 0..d {
            for b in 0..d {
                assert_eq!(reference.at(a, b), other.at(a, b));
            }
        }
    }

    #[test]
    fn intertwiner_agrees_a1() {
        let falg = a1_falg();
        for k in 0..=2u32 {
            let nu = DimVector::from_coords(&[k]);
            let direct = component_matrix(&falg, &theta(&falg, &nu).unwrap()).unwrap();
            let oracle =
                component_matrix(&falg, &theta_by_intertwiner(&falg, &nu).unwrap()).unwrap();
            let d = falg.dim(&nu).unwrap();
            for a in 0..d {
                for b in 0..d {
                    assert_eq!(direct.at(a, b), oracle.at(a, b), "mismatch at {nu:?}");
                }
            }
        }
    }

    #[test]
    fn intertwiner_agrees_a2_adjointish() {
        let falg = Rc::new(FAlgebra::new(CartanDatum::a2()));
        let nu = DimVector::from_coords(&[1, 1]);
        let direct = component_matrix(&falg, &theta(&falg, &nu).unwrap()).unwrap();
        let oracle = component_matrix(&falg, &theta_by_intertwiner(&falg, &nu).unwrap()).unwrap();
        let d = falg.dim(&nu).unwrap();
        for a in 0..d {
            for b in 0..d {
                assert_eq!(direct.at(a, b), oracle.at(a, b));
            }
        }
    }

    #[test]
    fn theta_fixes_highest_tensors() {
        use crate::tensorcb::TensorModule;
        let falg = a1_falg();
        let tm = TensorModule::build(
            falg.clone(),
            &[WeightAnchor::new(vec![1]), WeightAnchor::new(vec![1])],
        )
        .unwrap();
        let comps = theta_components_upto(&falg, &DimVector::from_coords(&[2])).unwrap();
        // second factor highest: every positive component dies
        let top = tm.highest_vector();
        assert_eq!(apply_theta(&tm, &comps, &top).unwrap(), top);
        let x = crate::tensorcb::TensorVector::unit(vec![
            (DimVector::from_coords(&[1]), 0),
            (DimVector::zero(), 0),
        ]);
        assert_eq!(apply_theta(&tm, &comps, &x).unwrap(), x);
    }
}
