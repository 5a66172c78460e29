//! Data model for k-type fair-division instances: exact-rational valuations,
//! bundles of 1-based item ids, allocations, and the HV/MV/LV item classes.
//!
//! Agent slots are indexed `(type, slot within type)`; agents of one type are
//! interchangeable. An [`Allocation`] keeps its slots grouped by type.

use std::collections::BTreeSet;

use num_traits::Zero;
use serde_json::{json, Value};

use crate::error::InputError;
use crate::rational::{rational_from_json, rational_to_json, Rational};

/// A set of 1-based item ids. Always sorted and duplicate-free.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Bundle(BTreeSet<usize>);

impl Bundle {
    pub fn new() -> Self {
        Bundle(BTreeSet::new())
    }

    pub fn from_ids<I: IntoIterator<Item = usize>>(ids: I) -> Self {
        Bundle(ids.into_iter().collect())
    }

    pub fn ids(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, id: usize) -> bool {
        self.0.contains(&id)
    }

    pub fn insert(&mut self, id: usize) {
        self.0.insert(id);
    }

    pub fn remove(&mut self, id: usize) -> bool {
        self.0.remove(&id)
    }

    pub fn union(&self, other: &Bundle) -> Bundle {
        Bundle(self.0.union(&other.0).copied().collect())
    }

    pub fn is_disjoint(&self, other: &Bundle) -> bool {
        self.0.is_disjoint(&other.0)
    }

    /// Exact sum of member values. `valuation[i-1]` is the value of item `i`.
    pub fn value(&self, valuation: &[Rational]) -> Rational {
        self.ids()
            .map(|id| valuation[id - 1].clone())
            .fold(Rational::zero(), |acc, v| acc + v)
    }

    pub fn to_json(&self) -> Value {
        Value::Array(self.ids().map(Value::from).collect())
    }

    pub fn from_json(v: &Value) -> Result<Self, InputError> {
        let arr = v
            .as_array()
            .ok_or_else(|| InputError::BadJson("bundle must be an array".into()))?;
        let mut out = BTreeSet::new();
        for x in arr {
            let id = x
                .as_u64()
                .ok_or_else(|| InputError::BadJson("item id must be a positive integer".into()))?;
            out.insert(id as usize);
        }
        Ok(Bundle(out))
    }
}

impl FromIterator<usize> for Bundle {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Bundle::from_ids(iter)
    }
}

/// Exact sum of the bundle's values, with range checking.
pub fn bundle_value(valuation: &[Rational], bundle: &Bundle) -> Result<Rational, InputError> {
    let m = valuation.len();
    for id in bundle.ids() {
        if id == 0 || id > m {
            return Err(InputError::ItemOutOfRange { id, m });
        }
    }
    Ok(bundle.value(valuation))
}

/// A k-type instance: `m` items, `type_sizes[t]` agents of type `t`, and one
/// valuation vector per type (length `m`, non-negative).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TypedInstance {
    pub m: usize,
    pub type_sizes: Vec<usize>,
    pub valuations: Vec<Vec<Rational>>,
}

impl TypedInstance {
    pub fn new(
        m: usize,
        type_sizes: Vec<usize>,
        valuations: Vec<Vec<Rational>>,
    ) -> Result<Self, InputError> {
        let inst = TypedInstance {
            m,
            type_sizes,
            valuations,
        };
        inst.validate()?;
        Ok(inst)
    }

    pub fn validate(&self) -> Result<(), InputError> {
        if self.type_sizes.len() != self.valuations.len() {
            return Err(InputError::BadInstance(format!(
                "{} type sizes but {} valuation vectors",
                self.type_sizes.len(),
                self.valuations.len()
            )));
        }
        for (t, &size) in self.type_sizes.iter().enumerate() {
            if size == 0 {
                return Err(InputError::BadInstance(format!("type {t} has zero agents")));
            }
        }
        for (t, v) in self.valuations.iter().enumerate() {
            if v.len() != self.m {
                return Err(InputError::BadInstance(format!(
                    "type {t} has {} values for {} items",
                    v.len(),
                    self.m
                )));
            }
            if v.iter().any(|x| x < &Rational::zero()) {
                return Err(InputError::BadInstance(format!(
                    "type {t} has a negative value"
                )));
            }
        }
        Ok(())
    }

    /// Number of types.
    pub fn k(&self) -> usize {
        self.type_sizes.len()
    }

    /// Total number of agents.
    pub fn n(&self) -> usize {
        self.type_sizes.iter().sum()
    }

    /// True iff every type's values are non-increasing in item id.
    pub fn is_ordered(&self) -> bool {
        self.valuations
            .iter()
            .all(|v| v.windows(2).all(|w| w[0] >= w[1]))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "m": self.m,
            "types": self.type_sizes.iter().zip(&self.valuations).map(|(&count, values)| {
                json!({
                    "count": count,
                    "values": values.iter().map(rational_to_json).collect::<Vec<_>>(),
                })
            }).collect::<Vec<_>>(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, InputError> {
        let obj = v
            .as_object()
            .ok_or_else(|| InputError::BadJson("instance must be an object".into()))?;
        let m = obj
            .get("m")
            .and_then(Value::as_u64)
            .ok_or_else(|| InputError::BadJson("instance needs an integer \"m\"".into()))?
            as usize;
        let types = obj
            .get("types")
            .and_then(Value::as_array)
            .ok_or_else(|| InputError::BadJson("instance needs a \"types\" array".into()))?;
        let mut type_sizes = Vec::new();
        let mut valuations = Vec::new();
        for t in types {
            let count = t
                .get("count")
                .and_then(Value::as_u64)
                .ok_or_else(|| InputError::BadJson("type needs an integer \"count\"".into()))?;
            let values = t
                .get("values")
                .and_then(Value::as_array)
                .ok_or_else(|| InputError::BadJson("type needs a \"values\" array".into()))?;
            type_sizes.push(count as usize);
            valuations.push(
                values
                    .iter()
                    .map(rational_from_json)
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        TypedInstance::new(m, type_sizes, valuations)
    }
}

/// Where a merged type's agents came from: `(original type index, count)`.
pub type TypeGroups = Vec<Vec<(usize, usize)>>;

/// Merges types with identical valuation vectors (sizes summed) and sorts the
/// result by size descending, ties by first occurrence. Also returns, per
/// canonical type, the original types folded into it.
pub fn canonicalize_types_with_map(instance: &TypedInstance) -> (TypedInstance, TypeGroups) {
    struct Group {
        values: Vec<Rational>,
        members: Vec<(usize, usize)>,
        size: usize,
        first: usize,
    }
    let mut groups: Vec<Group> = Vec::new();
    for (t, values) in instance.valuations.iter().enumerate() {
        match groups.iter_mut().find(|g| &g.values == values) {
            Some(g) => {
                g.members.push((t, instance.type_sizes[t]));
                g.size += instance.type_sizes[t];
            }
            None => groups.push(Group {
                values: values.clone(),
                members: vec![(t, instance.type_sizes[t])],
                size: instance.type_sizes[t],
                first: t,
            }),
        }
    }
    groups.sort_by(|a, b| b.size.cmp(&a.size).then(a.first.cmp(&b.first)));
    let canonical = TypedInstance {
        m: instance.m,
        type_sizes: groups.iter().map(|g| g.size).collect(),
        valuations: groups.iter().map(|g| g.values.clone()).collect(),
    };
    let map = groups.into_iter().map(|g| g.members).collect();
    (canonical, map)
}

/// [`canonicalize_types_with_map`] without the bookkeeping.
pub fn canonicalize_types(instance: &TypedInstance) -> TypedInstance {
    canonicalize_types_with_map(instance).0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItemClass {
    /// Items 1..n of an ordered instance.
    Hv,
    /// Items n+1..min(2n, m).
    Mv,
    /// Items beyond 2n (empty when m = 2n).
    Lv,
}

/// Classifies the items of an ordered instance with `n` agents.
pub fn classify_items(n: usize, m: usize) -> Result<Vec<ItemClass>, InputError> {
    if m < n {
        return Err(InputError::BadInstance(format!(
            "cannot classify: m = {m} < n = {n}"
        )));
    }
    Ok((1..=m)
        .map(|id| {
            if id <= n {
                ItemClass::Hv
            } else if id <= 2 * n {
                ItemClass::Mv
            } else {
                ItemClass::Lv
            }
        })
        .collect())
}

pub fn item_class(n: usize, id: usize) -> ItemClass {
    if id <= n {
        ItemClass::Hv
    } else if id <= 2 * n {
        ItemClass::Mv
    } else {
        ItemClass::Lv
    }
}

/// One bundle per agent slot, slots grouped by type, plus any unallocated
/// items. `agent_types[s]` is the (0-based) type of slot `s`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Allocation {
    pub bundles: Vec<Bundle>,
    pub agent_types: Vec<usize>,
    pub leftover: Bundle,
}

impl Allocation {
    pub fn empty() -> Self {
        Allocation::default()
    }

    pub fn push(&mut self, agent_type: usize, bundle: Bundle) {
        // keep slots grouped by type: insert at the end of the type's group
        let pos = self
            .agent_types
            .iter()
            .position(|&t| t > agent_type)
            .unwrap_or(self.agent_types.len());
        self.agent_types.insert(pos, agent_type);
        self.bundles.insert(pos, bundle);
    }

    pub fn slots(&self) -> usize {
        self.bundles.len()
    }

    /// Checks shape against an instance: slot counts per type, disjointness,
    /// id ranges, and (bundles ∪ leftover) = [m].
    pub fn validate_against(&self, instance: &TypedInstance) -> Result<(), InputError> {
        if self.bundles.len() != self.agent_types.len() {
            return Err(InputError::BadAllocation(format!(
                "{} bundles but {} agent types",
                self.bundles.len(),
                self.agent_types.len()
            )));
        }
        let mut per_type = vec![0usize; instance.k()];
        for &t in &self.agent_types {
            if t >= instance.k() {
                return Err(InputError::BadAllocation(format!(
                    "agent type {t} out of range (instance has {} types)",
                    instance.k()
                )));
            }
            per_type[t] += 1;
        }
        if per_type != instance.type_sizes {
            return Err(InputError::BadAllocation(format!(
                "per-type slot counts {per_type:?} do not match type sizes {:?}",
                instance.type_sizes
            )));
        }
        let mut seen = vec![false; instance.m + 1];
        for bundle in self.bundles.iter().chain(std::iter::once(&self.leftover)) {
            for id in bundle.ids() {
                if id == 0 || id > instance.m {
                    return Err(InputError::ItemOutOfRange {
                        id,
                        m: instance.m,
                    });
                }
                if seen[id] {
                    return Err(InputError::BadAllocation(format!(
                        "item {id} appears in two bundles"
                    )));
                }
                seen[id] = true;
            }
        }
        if let Some(id) = (1..=instance.m).find(|&id| !seen[id]) {
            return Err(InputError::BadAllocation(format!(
                "item {id} is neither allocated nor in the leftover set"
            )));
        }
        Ok(())
    }

    /// Serializes with per-agent ratio strings (computed elsewhere).
    pub fn to_json(&self, ratios: Option<&[String]>) -> Value {
        json!({
            "bundles": self.bundles.iter().map(Bundle::to_json).collect::<Vec<_>>(),
            "agent_types": self.agent_types.clone(),
            "leftover": self.leftover.to_json(),
            "ratios": ratios.map(|r| r.to_vec()).unwrap_or_default(),
        })
    }

    pub fn from_json(v: &Value) -> Result<Self, InputError> {
        let obj = v
            .as_object()
            .ok_or_else(|| InputError::BadJson("allocation must be an object".into()))?;
        let bundles = obj
            .get("bundles")
            .and_then(Value::as_array)
            .ok_or_else(|| InputError::BadJson("allocation needs a \"bundles\" array".into()))?
            .iter()
            .map(Bundle::from_json)
            .collect::<Result<Vec<_>, _>>()?;
        let agent_types = obj
            .get("agent_types")
            .and_then(Value::as_array)
            .ok_or_else(|| InputError::BadJson("allocation needs an \"agent_types\" array".into()))?
            .iter()
            .map(|x| {
                x.as_u64()
                    .map(|u| u as usize)
                    .ok_or_else(|| InputError::BadJson("agent type must be an integer".into()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let leftover = match obj.get("leftover") {
            Some(l) => Bundle::from_json(l)?,
            None => Bundle::new(),
        };
        Ok(Allocation {
            bundles,
            agent_types,
            leftover,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{rat, rat_int};

    fn rats(xs: &[(i64, i64)]) -> Vec<Rational> {
        xs.iter().map(|&(n, d)| rat(n, d)).collect()
    }

    #[test]
    fn bundle_value_examples() {
        let v = rats(&[(1, 2), (1, 3), (1, 6)]);
        let b = Bundle::from_ids([1, 2, 3]);
        assert_eq!(bundle_value(&v, &b).unwrap(), rat_int(1));

        let v = rats(&[(5, 1), (0, 1), (2, 1)]);
        assert_eq!(bundle_value(&v, &Bundle::new()).unwrap(), rat_int(0));

        let v = rats(&[(7, 1), (5, 1), (4, 1), (3, 1), (2, 1)]);
        let b = Bundle::from_ids([1, 4]);
        assert_eq!(bundle_value(&v, &b).unwrap(), rat_int(10));
    }

    #[test]
    fn bundle_value_rejects_out_of_range_ids() {
        let v = rats(&[(1, 1)]);
        let b = Bundle::from_ids([2]);
        assert!(bundle_value(&v, &b).is_err());
    }

    #[test]
    fn classify_items_examples() {
        let classes = classify_items(3, 8).unwrap();
        assert_eq!(&classes[..3], &[ItemClass::Hv; 3]);
        assert_eq!(&classes[3..6], &[ItemClass::Mv; 3]);
        assert_eq!(&classes[6..], &[ItemClass::Lv; 2]);

        // m = 2n boundary: LV empty
        let classes = classify_items(3, 6).unwrap();
        assert!(classes.iter().all(|c| *c != ItemClass::Lv));

        let classes = classify_items(1, 2).unwrap();
        assert_eq!(classes, vec![ItemClass::Hv, ItemClass::Mv]);

        assert!(classify_items(3, 2).is_err());
    }

    #[test]
    fn canonicalize_merges_identical_vectors() {
        let v = rats(&[(1, 1), (2, 1)]);
        let inst = TypedInstance::new(2, vec![2, 3], vec![v.clone(), v.clone()]).unwrap();
        let canon = canonicalize_types(&inst);
        assert_eq!(canon.type_sizes, vec![5]);
        assert_eq!(canon.valuations, vec![v]);
    }

    #[test]
    fn canonicalize_sorts_by_size_descending() {
        let mk = |x: i64| rats(&[(x, 1), (1, 1)]);
        let inst =
            TypedInstance::new(2, vec![1, 4, 2], vec![mk(1), mk(2), mk(3)]).unwrap();
        let (canon, map) = canonicalize_types_with_map(&inst);
        assert_eq!(canon.type_sizes, vec![4, 2, 1]);
        assert_eq!(canon.valuations, vec![mk(2), mk(3), mk(1)]);
        assert_eq!(map, vec![vec![(1, 4)], vec![(2, 2)], vec![(0, 1)]]);
    }

    #[test]
    fn canonicalize_is_idempotent() {
        let mk = |x: i64| rats(&[(x, 1), (1, 1)]);
        let inst = TypedInstance::new(2, vec![1, 4, 2], vec![mk(1), mk(2), mk(3)]).unwrap();
        let once = canonicalize_types(&inst);
        let twice = canonicalize_types(&once);
        assert_eq!(once, twice);
    }

    #[test]
    fn allocation_groups_slots_by_type() {
        let mut alloc = Allocation::empty();
        alloc.push(1, Bundle::from_ids([1]));
        alloc.push(0, Bundle::from_ids([2]));
        alloc.push(1, Bundle::from_ids([3]));
        assert_eq!(alloc.agent_types, vec![0, 1, 1]);
        assert_eq!(alloc.bundles[0], Bundle::from_ids([2]));
        // second type-1 slot keeps insertion order within the group
        assert_eq!(alloc.bundles[1], Bundle::from_ids([1]));
        assert_eq!(alloc.bundles[2], Bundle::from_ids([3]));
    }

    #[test]
    fn instance_json_round_trip() {
        let inst = TypedInstance::new(
            3,
            vec![2, 1],
            vec![rats(&[(1, 2), (3, 1), (0, 1)]), rats(&[(2, 1), (2, 1), (1, 4)])],
        )
        .unwrap();
        let back = TypedInstance::from_json(&inst.to_json()).unwrap();
        assert_eq!(inst, back);
    }

    #[test]
    fn allocation_validation_catches_overlap_and_gaps() {
        let v = rats(&[(1, 1), (1, 1), (1, 1)]);
        let inst = TypedInstance::new(3, vec![2], vec![v]).unwrap();
        let good = Allocation {
            bundles: vec![Bundle::from_ids([1]), Bundle::from_ids([2])],
            agent_types: vec![0, 0],
            leftover: Bundle::from_ids([3]),
        };
        assert!(good.validate_against(&inst).is_ok());

        let overlap = Allocation {
            bundles: vec![Bundle::from_ids([1, 2]), Bundle::from_ids([2])],
            agent_types: vec![0, 0],
            leftover: Bundle::from_ids([3]),
        };
        assert!(overlap.validate_against(&inst).is_err());

        let gap = Allocation {
            bundles: vec![Bundle::from_ids([1]), Bundle::from_ids([2])],
            agent_types: vec![0, 0],
            leftover: Bundle::new(),
        };
        assert!(gap.validate_against(&inst).is_err());
    }
}
