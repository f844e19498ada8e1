//! JSON descriptors for groups, values, homomorphisms, Katětov maps, metric
//! spaces, moduli and step functions. Rationals are always strings `"p/q"`.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::de::{DeserializeOwned, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::extension::KatetovMap;
use crate::free::FiniteMetricSpace;
use crate::group::{FiniteAbelianGroup, GroupElement, GroupHom};
use crate::modulus::{Modulus, PiecewiseLinear};
use crate::pv::StepFunction;
use crate::rational::Rational;
use crate::values::{Cap, ValuedGroup};

/// Parses `text` into `T`, reporting the JSON path of the first mismatch.
pub fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de)
        .map_err(|e| Error::Schema { path: e.path().to_string(), message: e.inner().to_string() })
}

/// Like [`parse`] for an already parsed JSON value.
pub fn from_value<T: DeserializeOwned>(v: serde_json::Value) -> Result<T> {
    serde_path_to_error::deserialize(v)
        .map_err(|e| Error::Schema { path: e.path().to_string(), message: e.inner().to_string() })
}

pub fn to_pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("descriptors always serialize")
}

fn schema(path: impl Into<String>, message: impl fmt::Display) -> Error {
    Error::Schema { path: path.into(), message: message.to_string() }
}

/// A JSON object from string keys to rationals that keeps its key order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Table(pub Vec<(String, Rational)>);

impl Serialize for Table {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut m = s.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            m.serialize_entry(k, v)?;
        }
        m.end()
    }
}

impl<'de> Deserialize<'de> for Table {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = Table;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("an object of \"p/q\" strings")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Table, A::Error> {
                let mut out = Vec::new();
                let mut seen = BTreeSet::new();
                while let Some((k, v)) = map.next_entry::<String, Rational>()? {
                    if !seen.insert(k.clone()) {
                        return Err(serde::de::Error::custom(format!("duplicate key {k:?}")));
                    }
                    out.push((k, v));
                }
                Ok(Table(out))
            }
        }
        d.deserialize_map(V)
    }
}

fn parse_key(g: &FiniteAbelianGroup, key: &str, path: &str) -> Result<usize> {
    let coords: Vec<u64> = if key.trim().is_empty() {
        Vec::new()
    } else {
        key.split(',')
            .map(|c| c.trim().parse::<u64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| schema(format!("{path}[{key:?}]"), "key must be coordinates joined by commas"))?
    };
    g.index(&GroupElement(coords)).map_err(|e| schema(format!("{path}[{key:?}]"), e))
}

fn element(g: &FiniteAbelianGroup, e: &GroupElement, path: String) -> Result<usize> {
    g.index(e).map_err(|err| schema(path, err))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupDesc {
    pub factors: Vec<u64>,
}

impl GroupDesc {
    pub fn of(g: &FiniteAbelianGroup) -> Self {
        GroupDesc { factors: g.factors().to_vec() }
    }

    pub fn build(&self) -> Result<FiniteAbelianGroup> {
        FiniteAbelianGroup::new(self.factors.clone()).map_err(|e| schema("factors", e))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ValuedGroupDesc {
    pub factors: Vec<u64>,
    pub cap: Cap,
    pub exponent: u64,
    pub value: Table,
}

impl ValuedGroupDesc {
    pub fn of(v: &ValuedGroup) -> Self {
        let g = v.group();
        ValuedGroupDesc {
            factors: g.factors().to_vec(),
            cap: v.cap(),
            exponent: v.exponent(),
            value: Table(g.elements().map(|x| (g.coords(x).key(), v.value(x).clone())).collect()),
        }
    }

    /// The raw table in element order; every element must be listed.
    pub fn table(&self) -> Result<(FiniteAbelianGroup, Vec<Rational>)> {
        let g = GroupDesc { factors: self.factors.clone() }.build()?;
        let mut t: Vec<Option<Rational>> = vec![None; g.order()];
        for (k, v) in &self.value.0 {
            let x = parse_key(&g, k, "value")?;
            if t[x].is_some() {
                return Err(schema(format!("value[{k:?}]"), "element listed twice"));
            }
            t[x] = Some(v.clone());
        }
        let table = t
            .into_iter()
            .enumerate()
            .map(|(x, v)| v.ok_or_else(|| schema("value", format!("missing element {:?}", g.coords(x).key()))))
            .collect::<Result<Vec<_>>>()?;
        Ok((g, table))
    }

    /// Builds the valued group, checking every axiom of its class.
    pub fn build(&self) -> Result<ValuedGroup> {
        let (g, table) = self.table()?;
        ValuedGroup::new(&g, table, self.cap, self.exponent)
    }
}

/// A homomorphism as the list of images of the standard generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomDesc {
    pub source: GroupDesc,
    pub target: GroupDesc,
    pub images: Vec<GroupElement>,
}

impl HomDesc {
    pub fn of(h: &GroupHom) -> Self {
        HomDesc {
            source: GroupDesc::of(h.source()),
            target: GroupDesc::of(h.target()),
            images: h.generator_images().into_iter().map(|x| h.target().coords(x)).collect(),
        }
    }

    pub fn build(&self) -> Result<GroupHom> {
        let s = self.source.build()?;
        let t = self.target.build()?;
        self.build_between(&s, &t)
    }

    pub fn build_between(&self, s: &FiniteAbelianGroup, t: &FiniteAbelianGroup) -> Result<GroupHom> {
        let images = self
            .images
            .iter()
            .enumerate()
            .map(|(i, e)| element(t, e, format!("images[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        GroupHom::from_generator_images(s, t, &images)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KatetovDesc {
    pub domain: Vec<GroupElement>,
    pub f: Table,
    pub cap: Cap,
}

impl KatetovDesc {
    pub fn of(k: &KatetovMap) -> Self {
        let g = k.base().group();
        KatetovDesc {
            domain: k.domain().iter().map(|&x| g.coords(x)).collect(),
            f: Table(k.pairs().map(|(x, v)| (g.coords(x).key(), v.clone())).collect()),
            cap: k.cap(),
        }
    }

    pub fn build(&self, base: &ValuedGroup) -> Result<KatetovMap> {
        let g = base.group();
        let domain = self
            .domain
            .iter()
            .enumerate()
            .map(|(i, e)| element(g, e, format!("domain[{i}]")))
            .collect::<Result<Vec<_>>>()?;
        let mut f: Vec<Option<Rational>> = vec![None; domain.len()];
        for (k, v) in &self.f.0 {
            let x = parse_key(g, k, "f")?;
            let i =
                domain.iter().position(|&a| a == x).ok_or_else(|| schema(format!("f[{k:?}]"), "not in the domain"))?;
            f[i] = Some(v.clone());
        }
        let pairs = domain
            .iter()
            .zip(f)
            .map(|(&a, v)| v.map(|v| (a, v)).ok_or_else(|| schema("f", format!("no value at {}", g.coords(a).key()))))
            .collect::<Result<Vec<_>>>()?;
        KatetovMap::new(base, pairs, self.cap)
    }
}

/// A finite metric space; `d` needs one of `"a,b"` or `"b,a"` for every pair.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricDesc {
    pub points: Vec<String>,
    pub d: Table,
}

impl MetricDesc {
    pub fn of(s: &FiniteMetricSpace) -> Self {
        let p = s.points();
        let mut d = Vec::new();
        for i in 0..p.len() {
            for j in i + 1..p.len() {
                d.push((format!("{},{}", p[i], p[j]), s.dist(i, j).clone()));
            }
        }
        MetricDesc { points: p.to_vec(), d: Table(d) }
    }

    pub fn build(&self) -> Result<FiniteMetricSpace> {
        let n = self.points.len();
        if let Some(i) = self.points.iter().position(|p| p.contains(',')) {
            return Err(schema(format!("points[{i}]"), "labels may not contain commas"));
        }
        let mut m: Vec<Vec<Option<Rational>>> = vec![vec![None; n]; n];
        for i in 0..n {
            m[i][i] = Some(Rational::zero());
        }
        let pos = |label: &str, key: &str| {
            self.points
                .iter()
                .position(|p| p == label)
                .ok_or_else(|| schema(format!("d[{key:?}]"), format!("unknown point {label:?}")))
        };
        for (k, v) in &self.d.0 {
            let (a, b) = k.split_once(',').ok_or_else(|| schema(format!("d[{k:?}]"), "key must be \"a,b\""))?;
            let (i, j) = (pos(a, k)?, pos(b, k)?);
            for (x, y) in [(i, j), (j, i)] {
                match &m[x][y] {
                    Some(old) if old != v => {
                        return Err(schema(format!("d[{k:?}]"), "conflicts with another entry"));
                    }
                    _ => m[x][y] = Some(v.clone()),
                }
            }
        }
        let mut d = Vec::with_capacity(n);
        for (i, row) in m.into_iter().enumerate() {
            let row = row
                .into_iter()
                .enumerate()
                .map(|(j, v)| v.ok_or_else(|| schema("d", format!("missing {},{}", self.points[i], self.points[j]))))
                .collect::<Result<Vec<_>>>()?;
            d.push(row);
        }
        FiniteMetricSpace::new(self.points.clone(), d)
    }
}

/// A piecewise-linear function through `points`, continued with `tail_slope`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlDesc {
    pub points: Vec<(Rational, Rational)>,
    pub tail_slope: Rational,
}

impl PlDesc {
    pub fn of(f: &PiecewiseLinear) -> Self {
        PlDesc { points: f.points().to_vec(), tail_slope: f.tail_slope().clone() }
    }

    pub fn build(&self) -> Result<PiecewiseLinear> {
        PiecewiseLinear::new(self.points.clone(), self.tail_slope.clone())
    }

    pub fn modulus(&self) -> Result<Modulus> {
        Modulus::from_pl(self.build()?)
    }
}

/// A step function: `pieces[i] = [t, h]` means the value `h` on `[t_{i−1}, t)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepDesc {
    pub host: ValuedGroupDesc,
    pub pieces: Vec<(Rational, GroupElement)>,
}

impl StepDesc {
    pub fn of(u: &StepFunction) -> Self {
        let g = u.host().group();
        StepDesc {
            host: ValuedGroupDesc::of(u.host()),
            pieces: u.pieces().iter().map(|(t, h)| (t.clone(), g.coords(*h))).collect(),
        }
    }

    pub fn build(&self) -> Result<StepFunction> {
        self.build_on(Arc::new(self.host.build()?))
    }

    /// Builds over an existing host, which must match the descriptor's host.
    pub fn build_on(&self, host: Arc<ValuedGroup>) -> Result<StepFunction> {
        let g = host.group();
        let pieces = self
            .pieces
            .iter()
            .enumerate()
            .map(|(i, (t, e))| Ok((t.clone(), element(g, e, format!("pieces[{i}][1]"))?)))
            .collect::<Result<Vec<_>>>()?;
        StepFunction::new(host, pieces)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(a: i64, b: i64) -> Rational {
        Rational::new(a, b)
    }

    fn z4() -> ValuedGroup {
        let g = FiniteAbelianGroup::cyclic(4);
        ValuedGroup::new(&g, vec![r(0, 1), r(1, 2), r(1, 1), r(1, 2)], Cap::One, 4).unwrap()
    }

    #[test]
    fn valued_group_round_trip() {
        let v = z4();
        let text = to_pretty(&ValuedGroupDesc::of(&v));
        assert!(text.contains("\"1/2\""));
        let back: ValuedGroupDesc = parse(&text).unwrap();
        assert_eq!(back.build().unwrap(), v);
        assert_eq!(to_pretty(&back), text);
    }

    #[test]
    fn schema_errors_carry_paths() {
        let bad = r#"{"factors":[2],"cap":"1","exponent":2,"value":{"0":"0/1","1":"x"}}"#;
        match parse::<ValuedGroupDesc>(bad) {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "value.1"),
            other => panic!("{other:?}"),
        }
        let missing = r#"{"factors":[2],"cap":"1","exponent":2,"value":{"0":"0/1"}}"#;
        let d: ValuedGroupDesc = parse(missing).unwrap();
        assert!(matches!(d.build(), Err(Error::Schema { .. })));
        let extra = r#"{"factors":[2],"cap":"1","exponent":2,"value":{},"colour":1}"#;
        assert!(matches!(parse::<ValuedGroupDesc>(extra), Err(Error::Schema { .. })));
        let range = r#"{"factors":[2],"cap":"1","exponent":2,"value":{"0":"0/1","2":"1/1"}}"#;
        match parse::<ValuedGroupDesc>(range).unwrap().build() {
            Err(Error::Schema { path, .. }) => assert_eq!(path, "value[\"2\"]"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn hom_round_trip() {
        let s = FiniteAbelianGroup::cyclic(2);
        let t = FiniteAbelianGroup::new(vec![2, 4]).unwrap();
        let h = GroupHom::from_generator_images(&s, &t, &[t.index(&GroupElement(vec![1, 2])).unwrap()]).unwrap();
        let d: HomDesc = parse(&to_pretty(&HomDesc::of(&h))).unwrap();
        assert_eq!(d.build().unwrap(), h);
    }

    #[test]
    fn katetov_round_trip() {
        let v = z4();
        let k = KatetovMap::new(&v, vec![(0, r(1, 2)), (2, r(1, 2))], Cap::One).unwrap();
        let d: KatetovDesc = parse(&to_pretty(&KatetovDesc::of(&k))).unwrap();
        assert_eq!(d.build(&v).unwrap(), k);
    }

    #[test]
    fn metric_upper_triangle() {
        let text = r#"{"points":["a","b","c"],"d":{"a,b":"1/1","c,b":"1/2","a,c":"1/1"}}"#;
        let s = parse::<MetricDesc>(text).unwrap().build().unwrap();
        assert_eq!(s.dist(2, 1), &r(1, 2));
        let back: MetricDesc = parse(&to_pretty(&MetricDesc::of(&s))).unwrap();
        assert_eq!(back.build().unwrap(), s);
        let conflict = r#"{"points":["a","b"],"d":{"a,b":"1/1","b,a":"1/2"}}"#;
        assert!(matches!(parse::<MetricDesc>(conflict).unwrap().build(), Err(Error::Schema { .. })));
    }

    #[test]
    fn step_and_modulus_round_trip() {
        let host = Arc::new(z4());
        let u = StepFunction::new(host, vec![(r(1, 2), 1), (r(3, 1), 2)]).unwrap();
        let d: StepDesc = parse(&to_pretty(&StepDesc::of(&u))).unwrap();
        assert_eq!(d.build().unwrap(), u);
        let w = PiecewiseLinear::new(vec![(r(0, 1), r(0, 1)), (r(1, 1), r(2, 1))], r(1, 1)).unwrap();
        let p: PlDesc = parse(&to_pretty(&PlDesc::of(&w))).unwrap();
        assert_eq!(p.build().unwrap(), w);
    }
}
