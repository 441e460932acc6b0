use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::qspace::FiniteQuasiMetricSpace;
use crate::setmap::{ExtReal, ExtensionalMap, FinitePreorder, Utility};

pub const MIN_POINTS: usize = 2;
pub const MAX_POINTS: usize = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    /// `Φ` is the level-set map of a random preorder.
    Nested,
    /// `Φ(x)` is an independent random subset.
    Arbitrary,
    /// A random partial order with a utility strictly increasing along it.
    Preorder,
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nested" => Ok(Profile::Nested),
            "arbitrary" => Ok(Profile::Arbitrary),
            "preorder" => Ok(Profile::Preorder),
            _ => Err(Error::param("profile", format!("unknown profile `{s}`"))),
        }
    }
}

/// Knobs of the instance generator.
///
/// Off-diagonal distances are `0` with probability `zero_prob` and
/// otherwise `k / 16` for a uniform `k` in `1..=64`. Nested preorders put an
/// edge along a random linear order with probability `edge_prob` and against
/// it with probability `back_prob`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenParams {
    pub zero_prob: f64,
    pub edge_prob: f64,
    pub back_prob: f64,
    pub image_prob: f64,
}

impl Default for GenParams {
    fn default() -> Self {
        GenParams {
            zero_prob: 0.0,
            edge_prob: 0.4,
            back_prob: 0.05,
            image_prob: 0.4,
        }
    }
}

impl GenParams {
    pub fn with_zero_prob(mut self, p: f64) -> Self {
        self.zero_prob = p;
        self
    }

    fn validate(&self) -> Result<()> {
        for (name, p) in [
            ("zero_prob", self.zero_prob),
            ("edge_prob", self.edge_prob),
            ("back_prob", self.back_prob),
            ("image_prob", self.image_prob),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::param(name, format!("must lie in [0, 1], got {p}")));
            }
        }
        Ok(())
    }
}

/// A desk-scale space with a map on it.
#[derive(Clone, Debug)]
pub struct FiniteInstance {
    pub space: FiniteQuasiMetricSpace,
    pub map: ExtensionalMap,
    pub preorder: Option<FinitePreorder>,
    pub utility: Option<Vec<f64>>,
    pub seed: u64,
    pub profile: Profile,
    pub params: GenParams,
}

impl FiniteInstance {
    pub fn len(&self) -> usize {
        self.space.len()
    }

    pub fn is_empty(&self) -> bool {
        self.space.is_empty()
    }

    pub fn utility_fn(&self) -> Option<Utility<usize>> {
        self.utility
            .as_ref()
            .map(|v| Utility::from_values(v.iter().map(|&t| ExtReal::from(t)).collect()))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "seed": self.seed,
            "profile": self.profile,
            "params": self.params,
            "space": self.space.to_json(),
            "map": self.map.to_json(&self.space),
            "preorder": self.preorder.as_ref().map(|p| p.to_json(self.space.labels())),
            "utility": self.utility,
        })
    }

    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |k: &'static str| v.get(k).ok_or_else(|| Error::param(k, "missing from instance"));
        let space = FiniteQuasiMetricSpace::from_json(&field("space")?.to_string())?;
        let map = ExtensionalMap::from_json(&field("map")?.to_string(), &space)?;
        let preorder = match v.get("preorder") {
            Some(p) if !p.is_null() => Some(crate::setmap::preorder_for_space(&p.to_string(), &space)?),
            _ => None,
        };
        Ok(FiniteInstance {
            map,
            preorder,
            utility: serde_json::from_value(v.get("utility").cloned().unwrap_or(Value::Null))?,
            seed: serde_json::from_value(field("seed")?.clone())?,
            profile: serde_json::from_value(field("profile")?.clone())?,
            params: serde_json::from_value(field("params")?.clone())?,
            space,
        })
    }
}

/// All-pairs shortest paths over the directed distance graph. Keeps zero
/// diagonals and nonnegativity and makes the triangle inequality hold.
pub fn metric_closure(m: &mut [Vec<f64>]) {
    let n = m.len();
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = m[i][k] + m[k][j];
                if via < m[i][j] {
                    m[i][j] = via;
                }
            }
        }
    }
}

fn random_matrix(n: usize, rng: &mut ChaCha8Rng, zero_prob: f64) -> Vec<Vec<f64>> {
    let mut m = vec![vec![0.0; n]; n];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, d) in row.iter_mut().enumerate() {
            if i != j {
                *d = if rng.gen_bool(zero_prob) {
                    0.0
                } else {
                    rng.gen_range(1..=64u32) as f64 / 16.0
                };
            }
        }
    }
    metric_closure(&mut m);
    m
}

fn random_order(n: usize, rng: &mut ChaCha8Rng, edge_prob: f64, back_prob: f64) -> Result<FinitePreorder> {
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut edges = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(edge_prob) {
                edges.push((perm[a], perm[b]));
            }
            if back_prob > 0.0 && rng.gen_bool(back_prob) {
                edges.push((perm[b], perm[a]));
            }
        }
    }
    FinitePreorder::from_edges(n, &edges, true)
}

pub fn random_instance(n: usize, seed: u64, profile: Profile) -> Result<FiniteInstance> {
    random_instance_with(n, seed, profile, GenParams::default())
}

/// Deterministic in `(n, seed, profile, params)`.
pub fn random_instance_with(n: usize, seed: u64, profile: Profile, params: GenParams) -> Result<FiniteInstance> {
    if !(MIN_POINTS..=MAX_POINTS).contains(&n) {
        return Err(Error::param("n", format!("must lie in {MIN_POINTS}..={MAX_POINTS}, got {n}")));
    }
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = FiniteQuasiMetricSpace::from_matrix(random_matrix(n, &mut rng, params.zero_prob))?;
    let (map, preorder, utility) = match profile {
        Profile::Nested => {
            let p = random_order(n, &mut rng, params.edge_prob, params.back_prob)?;
            (p.level_set_map(), Some(p), None)
        }
        Profile::Arbitrary => {
            let images = (0..n)
                .map(|_| (0..n).filter(|_| rng.gen_bool(params.image_prob)).collect())
                .collect();
            (ExtensionalMap::new(images)?, None, None)
        }
        Profile::Preorder => {
            let p = random_order(n, &mut rng, params.edge_prob, 0.0)?;
            // |S(x)| grows strictly along the order; distinct sixteenths break ties
            let mut frac: Vec<usize> = (0..16).collect();
            frac.shuffle(&mut rng);
            let phi = (0..n)
                .map(|x| p.level_set(x).len() as f64 + frac[x] as f64 / 16.0)
                .collect();
            (p.level_set_map(), Some(p), Some(phi))
        }
    };
    Ok(FiniteInstance {
        space,
        map,
        preorder,
        utility,
        seed,
        profile,
        params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::Status;
    use crate::qspace::check_axioms;

    #[test]
    fn repaired_matrices_satisfy_axioms() {
        for seed in 0..200 {
            for zp in [0.0, 0.3] {
                let inst = random_instance_with(2 + (seed as usize % 7), seed, Profile::Arbitrary, GenParams::default().with_zero_prob(zp)).unwrap();
                assert_eq!(check_axioms(&inst.space).overall, Status::Holds, "seed {seed}");
            }
        }
    }

    #[test]
    fn two_points_all_triangles() {
        let inst = random_instance(2, 11, Profile::Nested).unwrap();
        let d = |i: usize, j: usize| inst.space.d(i, j);
        let mut count = 0;
        for x in 0..2 {
            for y in 0..2 {
                for z in 0..2 {
                    assert!(d(x, z) <= d(x, y) + d(y, z));
                    count += 1;
                }
            }
        }
        assert_eq!(count, 8);
    }

    #[test]
    fn zero_off_diagonal_is_still_valid() {
        let s = FiniteQuasiMetricSpace::from_matrix(vec![vec![0.0, 0.0], vec![0.0, 0.0]]).unwrap();
        let r = check_axioms(&s);
        assert_eq!(r.overall, Status::Holds);
        assert_eq!(r.informational.iter().find(|e| e.label == "point_separation").unwrap().status, Status::Fails);
    }

    #[test]
    fn closure_takes_shortcuts() {
        let mut m = vec![vec![0.0, 1.0, 4.0], vec![9.0, 0.0, 1.0], vec![1.0, 9.0, 0.0]];
        metric_closure(&mut m);
        assert_eq!(m, vec![vec![0.0, 1.0, 2.0], vec![2.0, 0.0, 1.0], vec![1.0, 2.0, 0.0]]);
    }

    #[test]
    fn deterministic_and_round_trips() {
        for profile in [Profile::Nested, Profile::Arbitrary, Profile::Preorder] {
            let a = random_instance(6, 42, profile).unwrap().to_json();
            let b = random_instance(6, 42, profile).unwrap().to_json();
            assert_eq!(a.to_string(), b.to_string());
            let back = FiniteInstance::from_json(&a).unwrap().to_json();
            assert_eq!(a, back);
        }
        assert_ne!(
            random_instance(6, 1, Profile::Nested).unwrap().to_json(),
            random_instance(6, 2, Profile::Nested).unwrap().to_json()
        );
    }

    #[test]
    fn size_range() {
        assert!(random_instance(1, 0, Profile::Nested).is_err());
        assert!(random_instance(9, 0, Profile::Nested).is_err());
    }

    #[test]
    fn preorder_profile_utility_is_strictly_monotone() {
        for seed in 0..50 {
            let inst = random_instance(7, seed, Profile::Preorder).unwrap();
            let p = inst.preorder.as_ref().unwrap();
            let phi = inst.utility.as_ref().unwrap();
            assert_eq!(p.check().informational[0].status, Status::Holds);
            for u in 0..7 {
                for x in 0..7 {
                    if u != x && p.le(u, x) {
                        assert!(phi[u] < phi[x]);
                    }
                }
            }
        }
    }

    #[test]
    fn nested_profile_is_f1_by_construction() {
        let inst = random_instance(3, 7, Profile::Nested).unwrap();
        for x in 0..3 {
            for &u in inst.map.image_of(x) {
                assert!(inst.map.image_of(u).iter().all(|v| inst.map.image_of(x).contains(v)));
            }
        }
    }
}
