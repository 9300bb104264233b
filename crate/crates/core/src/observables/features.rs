use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};

/// Weight given to a common neighbor as a function of its degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    /// f(x) = 1: plain common-neighbor count.
    Count,
    /// f(x) = x.
    Raw,
    /// f(x) = 1 / ln x (Adamic-Adar); degree 1 uses 1 / ln 2.
    Aa,
    /// f(x) = x^-0.5
    PowHalf,
    /// f(x) = x^-0.3
    PowThree,
}

impl Kernel {
    pub const ALL: [Kernel; 5] = [Kernel::Count, Kernel::Raw, Kernel::Aa, Kernel::PowHalf, Kernel::PowThree];

    pub fn eval(self, degree: usize) -> f64 {
        let x = degree as f64;
        match self {
            Kernel::Count => 1.0,
            Kernel::Raw => x,
            Kernel::Aa if degree <= 1 => 1.0 / (1.0 + x).ln(),
            Kernel::Aa => 1.0 / x.ln(),
            Kernel::PowHalf => x.powf(-0.5),
            Kernel::PowThree => x.powf(-0.3),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Kernel::Count => "count",
            Kernel::Raw => "raw",
            Kernel::Aa => "aa",
            Kernel::PowHalf => "pow_half",
            Kernel::PowThree => "pow_three",
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Kernel::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown kernel {s:?}")))
    }
}

pub const TRANSFORM_NAMES: [&str; 5] = ["id", "log1p", "sqrt", "pow03", "sq"];

/// s, ln(s+1), s^0.5, s^0.3, s²
pub fn transforms(s: f64) -> [f64; 5] {
    [s, s.ln_1p(), s.sqrt(), s.powf(0.3), s * s]
}

/// Which kernels feed the feature vector. Each kernel sum is expanded
/// through every transform, then an intercept is appended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FeatureSpec {
    kernels: Vec<Kernel>,
}

impl Default for FeatureSpec {
    fn default() -> Self {
        FeatureSpec {
            kernels: Kernel::ALL.to_vec(),
        }
    }
}

impl FeatureSpec {
    pub fn new(kernels: Vec<Kernel>) -> Result<Self> {
        if kernels.is_empty() {
            return Err(Error::InvalidArgument("feature spec needs at least one kernel".into()));
        }
        for (i, k) in kernels.iter().enumerate() {
            if kernels[..i].contains(k) {
                return Err(Error::InvalidArgument(format!("kernel {k} listed twice")));
            }
        }
        Ok(FeatureSpec { kernels })
    }

    pub fn kernels(&self) -> &[Kernel] {
        &self.kernels
    }

    pub fn len(&self) -> usize {
        self.kernels.len() * TRANSFORM_NAMES.len() + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn names(&self) -> Vec<String> {
        let mut names: Vec<String> = self
            .kernels
            .iter()
            .flat_map(|k| TRANSFORM_NAMES.iter().map(move |t| format!("{k}_{t}")))
            .collect();
        names.push("intercept".into());
        names
    }

    /// Inverse of [`FeatureSpec::names`].
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut kernels = Vec::new();
        for chunk in names.chunks(TRANSFORM_NAMES.len()) {
            if chunk.len() < TRANSFORM_NAMES.len() {
                break;
            }
            let first = chunk[0].as_ref();
            let kernel: Kernel = first
                .strip_suffix("_id")
                .ok_or_else(|| Error::Format(format!("unexpected feature name {first:?}")))?
                .parse()?;
            kernels.push(kernel);
        }
        let spec = FeatureSpec::new(kernels).map_err(|e| Error::Format(e.to_string()))?;
        let expected = spec.names();
        if expected.len() != names.len() || expected.iter().zip(names).any(|(a, b)| a != b.as_ref()) {
            return Err(Error::Format(format!("feature names do not match the layout {expected:?}")));
        }
        Ok(spec)
    }

    /// Raw kernel sums Σ_{z ∈ Γ(x) ∩ Γ(y)} f(|Γ(z)|), one per kernel.
    pub fn kernel_sums(&self, g: &Graph, x: NodeId, y: NodeId) -> Vec<f64> {
        let mut sums = vec![0.0; self.kernels.len()];
        g.for_each_common_neighbor(x, y, |z| {
            let deg = g.degree(z);
            for (s, k) in sums.iter_mut().zip(&self.kernels) {
                *s += k.eval(deg);
            }
        });
        sums
    }
}

/// Feature vector of the pair `(x, y)` on `g`, laid out as
/// [`FeatureSpec::names`].
pub fn score_pair(g: &Graph, spec: &FeatureSpec, x: NodeId, y: NodeId) -> Result<Vec<f64>> {
    for node in [x, y] {
        if node >= g.num_nodes() {
            return Err(Error::NodeOutOfRange {
                node,
                num_nodes: g.num_nodes(),
            });
        }
    }
    let mut out = Vec::with_capacity(spec.len());
    for s in spec.kernel_sums(g, x, y) {
        out.extend(transforms(s));
    }
    out.push(1.0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Directedness;
    use proptest::prelude::*;

    fn undirected(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, Directedness::Undirected, edges.iter().copied()).unwrap().0
    }

    fn sum_of(spec: &FeatureSpec, v: &[f64], k: Kernel) -> f64 {
        let pos = spec.kernels().iter().position(|&x| x == k).unwrap();
        v[pos * 5]
    }

    #[test]
    fn layout() {
        let spec = FeatureSpec::default();
        assert_eq!(spec.len(), 26);
        let names = spec.names();
        assert_eq!(names[0], "count_id");
        assert_eq!(names[25], "intercept");
        assert_eq!(FeatureSpec::from_names(&names).unwrap(), spec);
        let aa = FeatureSpec::new(vec![Kernel::Aa, Kernel::PowHalf]).unwrap();
        assert_eq!(FeatureSpec::from_names(&aa.names()).unwrap(), aa);
        assert!(FeatureSpec::from_names(&names[1..]).is_err());
        assert!(FeatureSpec::new(vec![Kernel::Aa, Kernel::Aa]).is_err());
    }

    #[test]
    fn disjoint_neighborhoods_are_zero() {
        let g = undirected(4, &[(0, 1), (2, 3)]);
        let v = score_pair(&g, &FeatureSpec::default(), 0, 2).unwrap();
        assert!(v[..25].iter().all(|&x| x == 0.0));
        assert_eq!(v[25], 1.0);
    }

    #[test]
    fn four_cycle() {
        let g = undirected(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]);
        let spec = FeatureSpec::default();
        let v = score_pair(&g, &spec, 0, 2).unwrap();
        assert_eq!(sum_of(&spec, &v, Kernel::Count), 2.0);
        let aa = 2.0 / 2f64.ln();
        assert!((sum_of(&spec, &v, Kernel::Aa) - 2.8854).abs() < 1e-4);
        assert!((sum_of(&spec, &v, Kernel::Aa) - aa).abs() < 1e-12);
        let pos = 2 * 5;
        let t = &v[pos..pos + 5];
        assert_eq!(t, &transforms(aa));
        assert_eq!(t[1], aa.ln_1p());
    }

    #[test]
    fn star_leaves() {
        let d = 7;
        let edges: Vec<_> = (1..=d).map(|i| (0, i)).collect();
        let g = undirected(d + 1, &edges);
        let spec = FeatureSpec::default();
        let v = score_pair(&g, &spec, 1, 2).unwrap();
        assert_eq!(sum_of(&spec, &v, Kernel::Raw), d as f64);
        assert!((sum_of(&spec, &v, Kernel::PowHalf) - (d as f64).powf(-0.5)).abs() < 1e-15);
    }

    #[test]
    fn degree_one_guard() {
        assert!(Kernel::Aa.eval(1).is_finite());
        assert_eq!(Kernel::Aa.eval(1), 1.0 / 2f64.ln());
        assert_eq!(Kernel::Aa.eval(2), 1.0 / 2f64.ln());
        assert_eq!(Kernel::Aa.eval(10), 1.0 / 10f64.ln());
    }

    #[test]
    fn directed_uses_undirected_neighborhoods() {
        let g = Graph::from_edges(3, Directedness::Directed, [(0, 1), (1, 2)]).unwrap().0;
        let spec = FeatureSpec::new(vec![Kernel::Count]).unwrap();
        assert_eq!(score_pair(&g, &spec, 0, 2).unwrap()[0], 1.0);
    }

    proptest! {
        #[test]
        fn symmetric_and_finite(edges in proptest::collection::vec((0usize..12, 0usize..12), 0..50)) {
            let g = undirected(12, &edges);
            let spec = FeatureSpec::default();
            for x in 0..12 {
                for y in 0..12 {
                    let a = score_pair(&g, &spec, x, y).unwrap();
                    prop_assert!(a.iter().all(|v| v.is_finite()));
                    prop_assert_eq!(spec.kernel_sums(&g, x, y), spec.kernel_sums(&g, y, x));
                }
            }
        }
    }
}
