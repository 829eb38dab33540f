//! Symmetric Cartan data, dimension vectors, weights, and the grading twist
//! exponent used by the commutor.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};

/// A symmetric Cartan datum: a finite loop-free graph on an ordered vertex
/// set. Off-diagonal Cartan entries are minus the edge multiplicities.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CartanDatum {
    labels: Vec<String>,
    /// edge_mult[i][j] = number of edges between vertices i and j, i != j.
    edge_mult: Vec<Vec<u32>>,
}

impl CartanDatum {
    pub fn new(labels: Vec<String>, edges: &[(usize, usize, u32)]) -> Result<Self> {
        let n = labels.len();
        if n == 0 {
            return Err(Error::Config("Cartan datum needs at least one vertex".into()));
        }
        let mut edge_mult = vec![vec![0u32; n]; n];
        for &(i, j, m) in edges {
            if i >= n || j >= n {
                return Err(Error::Config(format!("edge ({i},{j}) references unknown vertex")));
            }
            if i == j {
                return Err(Error::Config(format!("loop at vertex {i} not allowed")));
            }
            edge_mult[i][j] += m;
            edge_mult[j][i] += m;
        }
        Ok(CartanDatum { labels, edge_mult })
    }

    /// Type A_1: a single vertex.
    pub fn a1() -> Self {
        Self::new(vec!["1".into()], &[]).unwrap()
    }

    /// Type A_2: two vertices joined by one edge.
    pub fn a2() -> Self {
        Self::new(vec!["1".into(), "2".into()], &[(0, 1, 1)]).unwrap()
    }

    /// Type A_1 x A_1: two disconnected vertices.
    pub fn a1xa1() -> Self {
        Self::new(vec!["1".into(), "2".into()], &[]).unwrap()
    }

    /// Type A_n path graph.
    pub fn a_n(n: usize) -> Self {
        let labels = (1..=n).map(|k| k.to_string()).collect();
        let edges: Vec<(usize, usize, u32)> = (0..n.saturating_sub(1)).map(|k| (k, k + 1, 1)).collect();
        Self::new(labels, &edges).unwrap()
    }

    pub fn rank(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn vertex_by_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Generalized Cartan matrix entry a_{ij}.
    pub fn cartan_entry(&self, i: usize, j: usize) -> i64 {
        if i == j {
            2
        } else {
            -(self.edge_mult[i][j] as i64)
        }
    }

    pub fn cartan_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        (0..n)
            .map(|i| (0..n).map(|j| self.cartan_entry(i, j)).collect())
            .collect()
    }

    /// The symmetric bilinear form `(nu, mu) = nu^T A mu`.
    pub fn sym_form(&self, nu: &DimVector, mu: &DimVector) -> i64 {
        let mut acc = 0i64;
        for (i, a) in nu.iter() {
            for (j, b) in mu.iter() {
                acc += (a as i64) * self.cartan_entry(i, j) * (b as i64);
            }
        }
        acc
    }

    /// Parse the JSON Cartan-datum file format:
    /// `{"vertices": ["1","2"], "edges": [["1","2",1]]}`.
    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("malformed Cartan JSON: {e}")))?;
        Self::from_json(&value)
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Config("Cartan file must be a JSON object".into()))?;
        let verts = obj
            .get("vertices")
            .and_then(|v| v.as_array())
            .ok_or_else(|| Error::Config("missing or non-array \"vertices\"".into()))?;
        let labels: Vec<String> = verts
            .iter()
            .enumerate()
            .map(|(k, v)| {
                v.as_str()
                    .map(str::to_owned)
                    .ok_or_else(|| Error::Config(format!("vertices[{k}] is not a string")))
            })
            .collect::<Result<_>>()?;
        {
            let mut seen = std::collections::BTreeSet::new();
            for l in &labels {
                if !seen.insert(l.clone()) {
                    return Err(Error::Config(format!("duplicate vertex label {l:?}")));
                }
            }
        }
        let mut edges = Vec::new();
        if let Some(es) = obj.get("edges") {
            let arr = es
                .as_array()
                .ok_or_else(|| Error::Config("\"edges\" is not an array".into()))?;
            for (k, e) in arr.iter().enumerate() {
                let triple = e
                    .as_array()
                    .filter(|t| t.len() == 2 || t.len() == 3)
                    .ok_or_else(|| Error::Config(format!("edges[{k}] must be [from, to, mult?]")))?;
                let find = |v: &serde_json::Value, which: &str| -> Result<usize> {
                    let label = v
                        .as_str()
                        .ok_or_else(|| Error::Config(format!("edges[{k}] {which} endpoint not a string")))?;
                    labels
                        .iter()
                        .position(|l| l == label)
                        .ok_or_else(|| Error::Config(format!("edges[{k}] references unknown vertex {label:?}")))
                };
                let i = find(&triple[0], "first")?;
                let j = find(&triple[1], "second")?;
                let m = if triple.len() == 3 {
                    triple[2]
                        .as_u64()
                        .ok_or_else(|| Error::Config(format!("edges[{k}] multiplicity must be a nonnegative integer")))?
                        as u32
                } else {
                    1
                };
                edges.push((i, j, m));
            }
        }
        Self::new(labels, &edges)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut map = serde_json::Map::new();
        map.insert(
            "vertices".into(),
            serde_json::Value::Array(
                self.labels.iter().map(|l| serde_json::Value::String(l.clone())).collect(),
            ),
        );
        let mut edges = Vec::new();
        for i in 0..self.rank() {
            for j in (i + 1)..self.rank() {
                if self.edge_mult[i][j] > 0 {
                    edges.push(serde_json::Value::Array(vec![
                        serde_json::Value::String(self.labels[i].clone()),
                        serde_json::Value::String(self.labels[j].clone()),
                        serde_json::Value::Number(self.edge_mult[i][j].into()),
                    ]));
                }
            }
        }
        map.insert("edges".into(), serde_json::Value::Array(edges));
        serde_json::Value::Object(map)
    }
}

/// An element of N[I]: a finitely supported nonnegative grading degree.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct DimVector {
    coords: BTreeMap<usize, u32>,
}

impl DimVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit(i: usize) -> Self {
        let mut coords = BTreeMap::new();
        coords.insert(i, 1);
        DimVector { coords }
    }

    pub fn from_coords(cs: &[u32]) -> Self {
        let mut coords = BTreeMap::new();
        for (i, &c) in cs.iter().enumerate() {
            if c > 0 {
                coords.insert(i, c);
            }
        }
        DimVector { coords }
    }

    pub fn get(&self, i: usize) -> u32 {
        self.coords.get(&i).copied().unwrap_or(0)
    }

    pub fn set(&mut self, i: usize, c: u32) {
        if c == 0 {
            self.coords.remove(&i);
        } else {
            self.coords.insert(i, c);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, u32)> + '_ {
        self.coords.iter().map(|(&i, &c)| (i, c))
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    /// Total degree `tr nu`.
    pub fn tr(&self) -> u32 {
        self.coords.values().sum()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (i, c) in other.iter() {
            out.set(i, out.get(i) + c);
        }
        out
    }

    pub fn add_unit(&self, i: usize, n: u32) -> Self {
        let mut out = self.clone();
        out.set(i, out.get(i) + n);
        out
    }

    /// Componentwise subtraction; `None` if any coordinate would go negative.
    pub fn checked_sub(&self, other: &Self) -> Option<Self> {
        let mut out = self.clone();
        for (i, c) in other.iter() {
            let cur = out.get(i);
            if cur < c {
                return None;
            }
            out.set(i, cur - c);
        }
        Some(out)
    }

    /// Componentwise `<=`.
    pub fn leq(&self, other: &Self) -> bool {
        self.iter().all(|(i, c)| c <= other.get(i))
    }

    /// All degrees `mu` with `mu <= self` componentwise, in (tr, lex) order.
    pub fn sub_degrees(&self) -> Vec<DimVector> {
        let idx: Vec<usize> = self.coords.keys().copied().collect();
        let mut out = vec![DimVector::zero()];
        for &i in &idx {
            let mut next = Vec::new();
            for base in &out {
                for c in 0..=self.get(i) {
                    let mut d = base.clone();
                    d.set(i, c);
                    next.push(d);
                }
            }
            out = next;
        }
        out.sort_by_key(|d| (d.tr(), d.clone()));
        out
    }

    pub fn to_json(&self, datum: &CartanDatum) -> serde_json::Value {
        serde_json::Value::Array(
            (0..datum.rank())
                .map(|i| serde_json::Value::Number(self.get(i).into()))
                .collect(),
        )
    }
}

impl fmt::Debug for DimVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (k, (i, c)) in self.iter().enumerate() {
            if k > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}a{i}")?;
        }
        write!(f, "]")
    }
}

/// Coordinates of a dominant anchor weight `Lambda` in the pairing basis
/// `<Lambda, alpha_i^vee>`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct WeightAnchor {
    coords: Vec<i64>,
}

impl WeightAnchor {
    pub fn new(coords: Vec<i64>) -> Self {
        WeightAnchor { coords }
    }

    pub fn dominant(coords: Vec<i64>) -> Result<Self> {
        if let Some((i, &c)) = coords.iter().enumerate().find(|(_, &c)| c < 0) {
            return Err(Error::Config(format!(
                "weight coordinate {c} at vertex index {i} is negative; dominant weight required"
            )));
        }
        Ok(WeightAnchor { coords })
    }

    pub fn zero(rank: usize) -> Self {
        WeightAnchor { coords: vec![0; rank] }
    }

    /// Fundamental weight omega_i.
    pub fn fundamental(rank: usize, i: usize) -> Self {
        let mut coords = vec![0; rank];
        coords[i] = 1;
        WeightAnchor { coords }
    }

    pub fn pairing(&self, i: usize) -> i64 {
        self.coords[i]
    }

    pub fn coords(&self) -> &[i64] {
        &self.coords
    }

    pub fn is_dominant(&self) -> bool {
        self.coords.iter().all(|&c| c >= 0)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::Value::Array(
            self.coords
                .iter()
                .map(|&c| serde_json::Value::Number(c.into()))
                .collect(),
        )
    }
}

/// A weight `lambda = Lambda - sum nu_i alpha_i`, stored as the dominant
/// anchor together with the subtracted root part.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Weight {
    pub anchor: WeightAnchor,
    pub root_part: DimVector,
}

impl Weight {
    pub fn highest(anchor: WeightAnchor) -> Self {
        Weight {
            anchor,
            root_part: DimVector::zero(),
        }
    }

    /// `<lambda, alpha_i^vee> = <Lambda, alpha_i^vee> - sum_j a_{ij} nu_j`.
    pub fn pairing(&self, datum: &CartanDatum, i: usize) -> i64 {
        let mut acc = self.anchor.pairing(i);
        for (j, c) in self.root_part.iter() {
            acc -= datum.cartan_entry(i, j) * (c as i64);
        }
        acc
    }

    pub fn sub(&self, nu: &DimVector) -> Weight {
        Weight {
            anchor: self.anchor.clone(),
            root_part: self.root_part.add(nu),
        }
    }
}

/// An ordered list of dominant anchors `(Lambda_1, ..., Lambda_N)`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct DominantSeq {
    pub weights: Vec<WeightAnchor>,
}

impl DominantSeq {
    pub fn new(weights: Vec<WeightAnchor>) -> Result<Self> {
        for w in &weights {
            if !w.is_dominant() {
                return Err(Error::Config(format!("non-dominant weight {:?}", w.coords())));
            }
        }
        Ok(DominantSeq { weights })
    }

    /// Parse the CLI rendering `"a,b;c,d;..."` in vertex order.
    pub fn parse(text: &str, rank: usize) -> Result<Self> {
        let mut weights = Vec::new();
        for (k, chunk) in text.split(';').enumerate() {
            let coords: Vec<i64> = chunk
                .split(',')
                .map(|s| {
                    s.trim()
                        .parse::<i64>()
                        .map_err(|_| Error::Config(format!("weight {k}: bad coordinate {s:?}")))
                })
                .collect::<Result<_>>()?;
            if coords.len() != rank {
                return Err(Error::Config(format!(
                    "weight {k} has {} coordinates, expected {rank}",
                    coords.len()
                )));
            }
            if let Some(pos) = coords.iter().position(|&c| c < 0) {
                return Err(Error::Config(format!(
                    "weight {k}: coordinate {} at position {pos} is negative",
                    coords[pos]
                )));
            }
            weights.push(WeightAnchor::new(coords));
        }
        Self::new(weights)
    }
}

/// The diagonal grading-twist exponent of the commutor on the bidegree
/// component `(nu1, nu2)` of `L(Lambda_1) x L(Lambda_2)`:
/// `(nu1, nu2) - sum_i nu2_i <Lambda_1, alpha_i^vee> - sum_i nu1_i <Lambda_2, alpha_i^vee>`.
///
/// This is the framed-quiver symmetric form with its constant part dropped,
/// which is all that survives the normalization of the commutor on the
/// highest-weight pair.
pub fn twist_exponent(
    datum: &CartanDatum,
    lambda1: &WeightAnchor,
    nu1: &DimVector,
    lambda2: &WeightAnchor,
    nu2: &DimVector,
) -> i64 {
    let mut acc = datum.sym_form(nu1, nu2);
    for (i, c) in nu2.iter() {
        acc -= (c as i64) * lambda1.pairing(i);
    }
    for (i, c) in nu1.iter() {
        acc -= (c as i64) * lambda2.pairing(i);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartan_matrices() {
        assert_eq!(CartanDatum::a2().cartan_matrix(), vec![vec![2, -1], vec![-1, 2]]);
        assert_eq!(CartanDatum::a1xa1().cartan_matrix(), vec![vec![2, 0], vec![0, 2]]);
        let kronecker = CartanDatum::new(vec!["1".into(), "2".into()], &[(0, 1, 2)]).unwrap();
        assert_eq!(kronecker.cartan_matrix(), vec![vec![2, -2], vec![-2, 2]]);
    }

    #[test]
    fn sym_form_values() {
        let a2 = CartanDatum::a2();
        let a1 = DimVector::unit(0);
        let a2v = DimVector::unit(1);
        assert_eq!(a2.sym_form(&a1, &a2v), -1);
        assert_eq!(a2.sym_form(&a1, &a1), 2);
        // bilinearity
        let s = a1.add(&a2v);
        assert_eq!(a2.sym_form(&s, &a2v), a2.sym_form(&a1, &a2v) + a2.sym_form(&a2v, &a2v));
    }

    #[test]
    fn weight_pairings() {
        let a1 = CartanDatum::a1();
        let w = Weight::highest(WeightAnchor::fundamental(1, 0));
        assert_eq!(w.pairing(&a1, 0), 1);
        assert_eq!(w.sub(&DimVector::unit(0)).pairing(&a1, 0), -1);

        let a2 = CartanDatum::a2();
        let w = Weight::highest(WeightAnchor::fundamental(2, 0)).sub(&DimVector::unit(0));
        assert_eq!(w.pairing(&a2, 1), 1);
    }

    #[test]
    fn twist_exponent_values() {
        let a1 = CartanDatum::a1();
        let om = WeightAnchor::fundamental(1, 0);
        let zero = DimVector::zero();
        let al = DimVector::unit(0);
        assert_eq!(twist_exponent(&a1, &om, &zero, &om, &zero), 0);
        assert_eq!(twist_exponent(&a1, &om, &al, &om, &zero), -1);
        // symmetry
        let a2 = CartanDatum::a2();
        let l1 = WeightAnchor::new(vec![2, 1]);
        let l2 = WeightAnchor::new(vec![0, 3]);
        let n1 = DimVector::from_coords(&[2, 1]);
        let n2 = DimVector::from_coords(&[1, 2]);
        assert_eq!(
            twist_exponent(&a2, &l1, &n1, &l2, &n2),
            twist_exponent(&a2, &l2, &n2, &l1, &n1)
        );
    }

    #[test]
    fn json_parsing() {
        let d = CartanDatum::from_json_str(r#"{"vertices": ["1","2"], "edges": [["1","2",1]]}"#).unwrap();
        assert_eq!(d, CartanDatum::a2());
        assert!(CartanDatum::from_json_str(r#"{"vertices": ["1"], "edges": [["1","9"]]}"#).is_err());
        assert!(CartanDatum::from_json_str("not json").is_err());
        assert!(CartanDatum::from_json_str(r#"{"vertices": ["1"], "edges": [["1","1"]]}"#).is_err());
    }

    #[test]
    fn dominant_seq_parsing() {
        let s = DominantSeq::parse("1,0;0,1", 2).unwrap();
        assert_eq!(s.weights.len(), 2);
        assert!(DominantSeq::parse("-1,0", 2).is_err());
        assert!(DominantSeq::parse("1", 2).is_err());
    }

    #[test]
    fn cartan_matrix_properties() {
        for d in [CartanDatum::a2(), CartanDatum::a1xa1(), CartanDatum::a_n(3)] {
            let m = d.cartan_matrix();
            for i in 0..d.rank() {
                assert_eq!(m[i][i], 2);
                for j in 0..d.rank() {
                    assert_eq!(m[i][j], m[j][i]);
                    if i != j {
                        assert!(m[i][j] <= 0);
                    }
                }
            }
        }
    }
}
