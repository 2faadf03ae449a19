//! Multiply-Add (MAP) hyperdimensional algebra over dense bipolar vectors.
//!
//! A [`Hypervector`] holds `d` elements, each exactly `-1` or `+1`. Binding is
//! elementwise multiplication (self-inverse), bundling is signed addition
//! clipped back to `{-1, +1}`, and similarity is cosine similarity. An even
//! number of bundled terms receives one extra random vector so that no
//! element sum is zero.
//!
//! [`Superposition`] keeps the unclipped integer sum of a bundle. It is used
//! where a sum of bound pairs is carried forward without clipping and only
//! clipped when it is itself bundled with other sums.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{check_dim, Error, Result};

/// Dense bipolar hypervector.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Hypervector {
    elems: Vec<i8>,
}

impl fmt::Debug for Hypervector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let head: Vec<i8> = self.elems.iter().take(8).copied().collect();
        write!(f, "Hypervector(d={}, {:?}..)", self.dim(), head)
    }
}

impl Hypervector {
    /// Builds a hypervector from raw elements, rejecting anything but `±1`.
    pub fn from_elements(elems: Vec<i8>) -> Result<Self> {
        if elems.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        if let Some(bad) = elems.iter().find(|&&e| e != 1 && e != -1) {
            return Err(Error::invalid(format!("hypervector element {bad} is not -1 or +1")));
        }
        Ok(Self { elems })
    }

    /// Uniform random `{-1, +1}` elements.
    pub fn random<R: Rng + ?Sized>(d: usize, rng: &mut R) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let mut elems = Vec::with_capacity(d);
        while elems.len() < d {
            let bits = rng.next_u64();
            let take = (d - elems.len()).min(64);
            elems.extend((0..take).map(|b| if (bits >> b) & 1 == 1 { 1i8 } else { -1i8 }));
        }
        Ok(Self { elems })
    }

    /// Sign of a real vector. Zero maps to `+1`.
    pub fn from_real(values: &[f64]) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidDimension(0));
        }
        let elems = values.iter().map(|&v| if v < 0.0 { -1 } else { 1 }).collect();
        Ok(Self { elems })
    }

    pub fn ones(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self { elems: vec![1; d] })
    }

    pub fn dim(&self) -> usize {
        self.elems.len()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.elems
    }

    pub fn to_real(&self) -> Vec<f64> {
        self.elems.iter().map(|&e| f64::from(e)).collect()
    }

    pub fn negated(&self) -> Self {
        Self { elems: self.elems.iter().map(|&e| -e).collect() }
    }

    pub fn bind(&self, other: &Hypervector) -> Result<Hypervector> {
        bind(self, other)
    }

    /// Exact cosine similarity: integer dot product divided by `d`.
    pub fn similarity(&self, other: &Hypervector) -> Result<f64> {
        check_dim(self.dim(), other.dim())?;
        Ok(bipolar_dot(&self.elems, &other.elems) as f64 / self.dim() as f64)
    }

    /// Packed form `"<d>:<hex>"`. Element `i` is bit `i % 8` (least significant
    /// first) of byte `i / 8`; a set bit is `+1`, a clear bit `-1`. Padding
    /// bits in the final byte are zero.
    pub fn to_packed_hex(&self) -> String {
        let mut bytes = vec![0u8; self.dim().div_ceil(8)];
        for (i, &e) in self.elems.iter().enumerate() {
            if e == 1 {
                bytes[i / 8] |= 1 << (i % 8);
            }
        }
        format!("{}:{}", self.dim(), hex::encode(bytes))
    }

    pub fn from_packed_hex(packed: &str) -> Result<Self> {
        let (d, payload) = packed
            .split_once(':')
            .ok_or_else(|| Error::invalid("packed hypervector must have the form <d>:<hex>"))?;
        let d: usize = d.trim().parse().map_err(|_| Error::invalid(format!("bad dimension `{d}`")))?;
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        let bytes = hex::decode(payload.trim()).map_err(|e| Error::invalid(format!("bad hex payload: {e}")))?;
        if bytes.len() != d.div_ceil(8) {
            return Err(Error::invalid(format!(
                "packed payload has {} bytes, expected {} for d={d}",
                bytes.len(),
                d.div_ceil(8)
            )));
        }
        let used = d % 8;
        if used != 0 && bytes[bytes.len() - 1] >> used != 0 {
            return Err(Error::invalid("nonzero padding bits in packed hypervector"));
        }
        let elems = (0..d)
            .map(|i| if (bytes[i / 8] >> (i % 8)) & 1 == 1 { 1 } else { -1 })
            .collect();
        Ok(Self { elems })
    }
}

impl Serialize for Hypervector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        self.elems.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Hypervector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let elems = Vec::<i8>::deserialize(deserializer)?;
        Hypervector::from_elements(elems).map_err(serde::de::Error::custom)
    }
}

fn bipolar_dot(a: &[i8], b: &[i8]) -> i64 {
    a.iter().zip(b).map(|(&x, &y)| i64::from(x * y)).sum()
}

/// Anything cosine similarity can be computed over.
pub trait Vector {
    fn dim(&self) -> usize;
    fn component(&self, i: usize) -> f64;

    /// Bipolar view, when the vector is one. Two bipolar operands use the exact
    /// integer path.
    fn as_bipolar(&self) -> Option<&[i8]> {
        None
    }
}

impl Vector for Hypervector {
    fn dim(&self) -> usize {
        self.elems.len()
    }
    fn component(&self, i: usize) -> f64 {
        f64::from(self.elems[i])
    }
    fn as_bipolar(&self) -> Option<&[i8]> {
        Some(&self.elems)
    }
}

impl Vector for [f64] {
    fn dim(&self) -> usize {
        self.len()
    }
    fn component(&self, i: usize) -> f64 {
        self[i]
    }
}

impl Vector for Vec<f64> {
    fn dim(&self) -> usize {
        self.len()
    }
    fn component(&self, i: usize) -> f64 {
        self[i]
    }
}

impl<V: Vector + ?Sized> Vector for &V {
    fn dim(&self) -> usize {
        (**self).dim()
    }
    fn component(&self, i: usize) -> f64 {
        (**self).component(i)
    }
    fn as_bipolar(&self) -> Option<&[i8]> {
        (**self).as_bipolar()
    }
}

/// Cosine similarity in `[-1, 1]`.
pub fn cosine_similarity<A: Vector + ?Sized, B: Vector + ?Sized>(x: &A, y: &B) -> Result<f64> {
    check_dim(x.dim(), y.dim())?;
    if x.dim() == 0 {
        return Err(Error::DegenerateVector);
    }
    if let (Some(a), Some(b)) = (x.as_bipolar(), y.as_bipolar()) {
        return Ok(bipolar_dot(a, b) as f64 / a.len() as f64);
    }
    let (mut dot, mut xx, mut yy) = (0.0, 0.0, 0.0);
    for i in 0..x.dim() {
        let (a, b) = (x.component(i), y.component(i));
        dot += a * b;
        xx += a * a;
        yy += b * b;
    }
    if xx == 0.0 || yy == 0.0 {
        return Err(Error::DegenerateVector);
    }
    Ok((dot / (xx.sqrt() * yy.sqrt())).clamp(-1.0, 1.0))
}

/// Elementwise product; self-inverse.
pub fn bind(x: &Hypervector, y: &Hypervector) -> Result<Hypervector> {
    check_dim(x.dim(), y.dim())?;
    Ok(Hypervector { elems: x.elems.iter().zip(&y.elems).map(|(&a, &b)| a * b).collect() })
}

/// Unclipped integer sum of bipolar terms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Superposition {
    sums: Vec<i32>,
    terms: usize,
}

impl Superposition {
    pub fn new(d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidDimension(0));
        }
        Ok(Self { sums: vec![0; d], terms: 0 })
    }

    pub fn from_hypervector(v: &Hypervector) -> Self {
        Self { sums: v.elems.iter().map(|&e| i32::from(e)).collect(), terms: 1 }
    }

    pub fn dim(&self) -> usize {
        self.sums.len()
    }

    /// Number of bipolar terms summed so far.
    pub fn terms(&self) -> usize {
        self.terms
    }

    pub fn sums(&self) -> &[i32] {
        &self.sums
    }

    pub fn add(&mut self, v: &Hypervector) -> Result<()> {
        check_dim(self.dim(), v.dim())?;
        for (s, &e) in self.sums.iter_mut().zip(&v.elems) {
            *s += i32::from(e);
        }
        self.terms += 1;
        Ok(())
    }

    /// Adds `x ⊗ y` without materializing it.
    pub fn add_bound(&mut self, x: &Hypervector, y: &Hypervector) -> Result<()> {
        check_dim(self.dim(), x.dim())?;
        check_dim(self.dim(), y.dim())?;
        for ((s, &a), &b) in self.sums.iter_mut().zip(&x.elems).zip(&y.elems) {
            *s += i32::from(a * b);
        }
        self.terms += 1;
        Ok(())
    }

    pub fn add_superposition(&mut self, other: &Superposition) -> Result<()> {
        check_dim(self.dim(), other.dim())?;
        for (s, &o) in self.sums.iter_mut().zip(&other.sums) {
            *s += o;
        }
        self.terms += other.terms;
        Ok(())
    }

    /// Elementwise product with a bipolar vector. Term count is unchanged.
    pub fn bind(&self, v: &Hypervector) -> Result<Superposition> {
        check_dim(self.dim(), v.dim())?;
        let sums = self.sums.iter().zip(&v.elems).map(|(&s, &e)| s * i32::from(e)).collect();
        Ok(Self { sums, terms: self.terms })
    }

    /// Clips the sum back to `{-1, +1}`. With an even term count a fresh random
    /// hypervector is added first, so no element is zero.
    pub fn clip<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<Hypervector> {
        if self.terms == 0 {
            return Err(Error::invalid("cannot clip an empty superposition"));
        }
        let mut sums = self.sums.clone();
        if self.terms.is_multiple_of(2) {
            let eta = Hypervector::random(self.dim(), rng)?;
            for (s, &e) in sums.iter_mut().zip(&eta.elems) {
                *s += i32::from(e);
            }
        }
        let elems = sums.iter().map(|&s| if s < 0 { -1 } else { 1 }).collect();
        Ok(Hypervector { elems })
    }

    pub fn to_real(&self) -> Vec<f64> {
        self.sums.iter().map(|&s| f64::from(s)).collect()
    }
}

impl Vector for Superposition {
    fn dim(&self) -> usize {
        self.sums.len()
    }
    fn component(&self, i: usize) -> f64 {
        f64::from(self.sums[i])
    }
}

/// Signed addition clipped to `{-1, +1}`; an even count gets a random tie-breaker.
pub fn bundle<'a, I, R>(vectors: I, rng: &mut R) -> Result<Hypervector>
where
    I: IntoIterator<Item = &'a Hypervector>,
    R: Rng + ?Sized,
{
    let mut iter = vectors.into_iter();
    let first = iter.next().ok_or_else(|| Error::invalid("cannot bundle an empty list"))?;
    let mut acc = Superposition::from_hypervector(first);
    for v in iter {
        acc.add(v)?;
    }
    acc.clip(rng)
}

/// Ordered, labelled symbol table used for cleanup.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Dictionary<V = Hypervector> {
    labels: Vec<String>,
    vectors: Vec<V>,
}

impl<V> Default for Dictionary<V> {
    fn default() -> Self {
        Self { labels: Vec::new(), vectors: Vec::new() }
    }
}

impl<V: Vector> Dictionary<V> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Entries labelled by their index.
    pub fn indexed(vectors: impl IntoIterator<Item = V>) -> Result<Self> {
        let mut dict = Self::new();
        for (i, v) in vectors.into_iter().enumerate() {
            dict.insert(i.to_string(), v)?;
        }
        Ok(dict)
    }

    pub fn insert(&mut self, label: impl Into<String>, vector: V) -> Result<()> {
        let label = label.into();
        if self.labels.contains(&label) {
            return Err(Error::invalid(format!("duplicate dictionary label `{label}`")));
        }
        if let Some(d) = self.dim() {
            check_dim(d, vector.dim())?;
        }
        self.labels.push(label);
        self.vectors.push(vector);
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.vectors.first().map(Vector::dim)
    }

    pub fn label(&self, index: usize) -> Option<&str> {
        self.labels.get(index).map(String::as_str)
    }

    pub fn vector(&self, index: usize) -> Option<&V> {
        self.vectors.get(index)
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &V)> {
        self.labels.iter().map(String::as_str).zip(&self.vectors)
    }

    pub fn vectors(&self) -> &[V] {
        &self.vectors
    }

    /// Cosine similarity of `query` to every entry, in dictionary order.
    pub fn similarities<Q: Vector + ?Sized>(&self, query: &Q) -> Result<Vec<f64>> {
        if self.is_empty() {
            return Err(Error::invalid("dictionary is empty"));
        }
        self.vectors.iter().map(|v| cosine_similarity(query, v)).collect()
    }
}

/// Result of a successful cleanup.
#[derive(Clone, Debug, PartialEq)]
pub struct Match<'a> {
    pub index: usize,
    pub label: &'a str,
    pub similarity: f64,
}

/// Index of the largest value; ties go to the lowest index.
pub(crate) fn argmax(values: &[f64]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        match best {
            Some(b) if v <= values[b] => {}
            _ => best = Some(i),
        }
    }
    best
}

/// Picks the entry with the highest similarity when it exceeds `theta`.
pub(crate) fn threshold_argmax(sims: &[f64], theta: f64) -> Option<usize> {
    argmax(sims).filter(|&i| sims[i] > theta)
}

/// Nearest dictionary entry by cosine similarity, accepted only above `theta`.
pub fn cleanup<'a, Q, V>(query: &Q, dict: &'a Dictionary<V>, theta: f64) -> Result<Option<Match<'a>>>
where
    Q: Vector + ?Sized,
    V: Vector,
{
    if theta.is_nan() || theta < 0.0 {
        return Err(Error::invalid(format!("threshold must be non-negative, got {theta}")));
    }
    let sims = dict.similarities(query)?;
    Ok(threshold_argmax(&sims, theta).map(|i| Match {
        index: i,
        label: &dict.labels[i],
        similarity: sims[i],
    }))
}

/// Distribution of similarity between unrelated random hypervectors.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseFloorStats {
    pub mean: f64,
    pub std_dev: f64,
    pub max_abs: f64,
    pub d: usize,
    pub samples: usize,
}

pub fn noise_floor<R: Rng + ?Sized>(d: usize, samples: usize, rng: &mut R) -> Result<NoiseFloorStats> {
    if samples < 2 {
        return Err(Error::invalid(format!("noise floor needs at least 2 samples, got {samples}")));
    }
    let mut sims = Vec::with_capacity(samples);
    for _ in 0..samples {
        let x = Hypervector::random(d, rng)?;
        let y = Hypervector::random(d, rng)?;
        sims.push(x.similarity(&y)?);
    }
    let (mean, std_dev) = mean_std(&sims);
    let max_abs = sims.iter().fold(0.0f64, |m, s| m.max(s.abs()));
    Ok(NoiseFloorStats { mean, std_dev, max_abs, d, samples })
}

/// Mean and sample standard deviation.
pub(crate) fn mean_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RecoveryPoint {
    pub pairs: usize,
    pub mean: f64,
    pub min: f64,
    pub max: f64,
}

/// Similarity of `x₁ ⊗ s` to `y₁`, where `s` bundles `b` bound pairs `xᵢ ⊗ yᵢ`,
/// for each `b` in `1..=max_pairs`.
pub fn bundle_recovery_curve<R: Rng + ?Sized>(
    d: usize,
    max_pairs: usize,
    trials: usize,
    rng: &mut R,
) -> Result<Vec<RecoveryPoint>> {
    if max_pairs == 0 || trials == 0 {
        return Err(Error::invalid("max_pairs and trials must be positive"));
    }
    let mut curve = Vec::with_capacity(max_pairs);
    for b in 1..=max_pairs {
        let mut sims = Vec::with_capacity(trials);
        for _ in 0..trials {
            let keys: Vec<Hypervector> = (0..b).map(|_| Hypervector::random(d, rng)).collect::<Result<_>>()?;
            let values: Vec<Hypervector> = (0..b).map(|_| Hypervector::random(d, rng)).collect::<Result<_>>()?;
            let mut acc = Superposition::new(d)?;
            for (k, v) in keys.iter().zip(&values) {
                acc.add_bound(k, v)?;
            }
            let s = acc.clip(rng)?;
            sims.push(bind(&keys[0], &s)?.similarity(&values[0])?);
        }
        let mean = sims.iter().sum::<f64>() / trials as f64;
        let min = sims.iter().copied().fold(f64::INFINITY, f64::min);
        let max = sims.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        curve.push(RecoveryPoint { pairs: b, mean, min, max });
    }
    Ok(curve)
}

/// Expected similarity between one component and the majority bundle of `b`
/// bipolar components (`b` odd), `C(b-1, (b-1)/2) / 2^(b-1)`.
pub fn majority_similarity(b: usize) -> f64 {
    assert!(b % 2 == 1, "majority similarity is defined for odd counts");
    let m = b - 1;
    // log-space binomial keeps large b finite
    let ln_choose: f64 = (1..=m / 2).map(|i| ((m / 2 + i) as f64 / i as f64).ln()).sum();
    (ln_choose - m as f64 * std::f64::consts::LN_2).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn hv(e: &[i8]) -> Hypervector {
        Hypervector::from_elements(e.to_vec()).unwrap()
    }

    #[test]
    fn random_elements_are_bipolar() {
        let v = Hypervector::random(4, &mut rng(1)).unwrap();
        assert!(v.as_slice().iter().all(|&e| e == 1 || e == -1));
        assert!(matches!(Hypervector::random(0, &mut rng(1)), Err(Error::InvalidDimension(0))));
    }

    #[test]
    fn random_is_seed_deterministic() {
        let a = Hypervector::random(1000, &mut rng(7)).unwrap();
        let b = Hypervector::random(1000, &mut rng(7)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn from_elements_rejects_zero() {
        assert!(Hypervector::from_elements(vec![1, 0, -1]).is_err());
        assert!(Hypervector::from_elements(vec![]).is_err());
    }

    #[test]
    fn from_real_maps_zero_to_plus_one() {
        let v = Hypervector::from_real(&[-0.5, 0.0, 2.0, -0.0]).unwrap();
        assert_eq!(v.as_slice(), &[-1, 1, 1, 1]);
    }

    #[test]
    fn bundle_single_is_identity() {
        let x = Hypervector::random(101, &mut rng(2)).unwrap();
        assert_eq!(bundle([&x], &mut rng(3)).unwrap(), x);
    }

    #[test]
    fn bundle_majority_forces_repeated_component() {
        let mut r = rng(4);
        let x = Hypervector::random(500, &mut r).unwrap();
        let y = Hypervector::random(500, &mut r).unwrap();
        assert_eq!(bundle([&x, &x, &y], &mut r).unwrap(), x);
    }

    #[test]
    fn bundle_even_count_uses_tie_breaker() {
        // x and -x cancel exactly; the result is the tie-breaker itself
        let mut r = rng(5);
        let x = Hypervector::random(256, &mut r).unwrap();
        let nx = x.negated();
        let mut r1 = rng(9);
        let out = bundle([&x, &nx], &mut r1).unwrap();
        let mut r2 = rng(9);
        assert_eq!(out, Hypervector::random(256, &mut r2).unwrap());
    }

    #[test]
    fn bundle_pair_similarity_is_one_half() {
        // positions where x and y agree copy x; tied positions are a coin flip
        let mut r = rng(6);
        let trials = 200;
        let mut total = 0.0;
        for _ in 0..trials {
            let x = Hypervector::random(10_000, &mut r).unwrap();
            let y = Hypervector::random(10_000, &mut r).unwrap();
            total += bundle([&x, &y], &mut r).unwrap().similarity(&x).unwrap();
        }
        assert!((total / trials as f64 - 0.5).abs() < 0.01);
    }

    #[test]
    fn bundle_errors() {
        let empty: Vec<Hypervector> = vec![];
        assert!(bundle(&empty, &mut rng(1)).is_err());
        let a = Hypervector::random(4, &mut rng(1)).unwrap();
        let b = Hypervector::random(5, &mut rng(1)).unwrap();
        assert!(matches!(bundle([&a, &b], &mut rng(1)), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn bind_identities() {
        let mut r = rng(8);
        let x = Hypervector::random(1000, &mut r).unwrap();
        let y = Hypervector::random(1000, &mut r).unwrap();
        assert_eq!(bind(&x, &x).unwrap(), Hypervector::ones(1000).unwrap());
        assert_eq!(bind(&x, &bind(&x, &y).unwrap()).unwrap(), y);
    }

    #[test]
    fn bound_vector_is_dissimilar_to_components() {
        let mut r = rng(10);
        let x = Hypervector::random(10_000, &mut r).unwrap();
        let y = Hypervector::random(10_000, &mut r).unwrap();
        let xy = bind(&x, &y).unwrap();
        assert!(xy.similarity(&x).unwrap().abs() < 0.03);
        assert!(xy.similarity(&y).unwrap().abs() < 0.03);
    }

    #[test]
    fn cosine_examples() {
        let x = hv(&[1, 1, -1, -1]);
        let y = hv(&[1, -1, 1, -1]);
        assert_eq!(cosine_similarity(&x, &x).unwrap(), 1.0);
        assert_eq!(cosine_similarity(&x, &x.negated()).unwrap(), -1.0);
        assert_eq!(cosine_similarity(&x, &y).unwrap(), 0.0);
    }

    #[test]
    fn cosine_degenerate_and_mismatch() {
        let z = vec![0.0, 0.0];
        let a = vec![1.0, 2.0];
        assert!(matches!(cosine_similarity(&z, &a), Err(Error::DegenerateVector)));
        assert!(matches!(
            cosine_similarity(&a, &vec![1.0]),
            Err(Error::DimensionMismatch { expected: 2, found: 1 })
        ));
    }

    #[test]
    fn cosine_mixed_bipolar_and_real() {
        let x = hv(&[1, -1, 1, -1]);
        let r = vec![2.0, -2.0, 2.0, -2.0];
        assert!((cosine_similarity(&x, &r).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cleanup_exact_match() {
        let mut r = rng(11);
        let dict = Dictionary::indexed((0..5).map(|_| Hypervector::random(1000, &mut r).unwrap())).unwrap();
        let q = dict.vector(3).unwrap().clone();
        let m = cleanup(&q, &dict, 0.5).unwrap().unwrap();
        assert_eq!((m.index, m.label, m.similarity), (3, "3", 1.0));
    }

    #[test]
    fn cleanup_rejects_unrelated_query() {
        let mut r = rng(12);
        let trials = 500;
        let mut hits = 0;
        for _ in 0..trials {
            let dict = Dictionary::indexed((0..25).map(|_| Hypervector::random(1000, &mut r).unwrap())).unwrap();
            let q = Hypervector::random(1000, &mut r).unwrap();
            if cleanup(&q, &dict, 0.15).unwrap().is_some() {
                hits += 1;
            }
        }
        assert!(hits as f64 / trials as f64 <= 0.01, "false hits {hits}");
    }

    #[test]
    fn cleanup_ties_go_to_lowest_index() {
        let x = hv(&[1, 1, 1, 1]);
        let mut dict = Dictionary::new();
        dict.insert("a", hv(&[1, 1, -1, -1])).unwrap();
        dict.insert("b", hv(&[-1, -1, 1, 1]).negated()).unwrap();
        let m = cleanup(&hv(&[1, 1, 1, -1]), &dict, 0.0).unwrap().unwrap();
        assert_eq!(m.label, "a");
        assert!(cleanup(&x, &Dictionary::<Hypervector>::new(), 0.1).is_err());
        assert!(cleanup(&x, &dict, -0.1).is_err());
    }

    #[test]
    fn dictionary_rejects_duplicates_and_mixed_dims() {
        let mut dict = Dictionary::new();
        dict.insert("a", hv(&[1, 1])).unwrap();
        assert!(dict.insert("a", hv(&[1, -1])).is_err());
        assert!(dict.insert("b", hv(&[1, -1, 1])).is_err());
    }

    #[test]
    fn noise_floor_matches_inverse_sqrt_d() {
        let mut r = rng(13);
        let nf = noise_floor(1000, 1000, &mut r).unwrap();
        assert!((nf.std_dev - 1.0 / 1000f64.sqrt()).abs() < 0.004, "{nf:?}");
        assert!(nf.mean.abs() < 3.0 * nf.std_dev / (nf.samples as f64).sqrt());
        assert!(nf.max_abs >= nf.std_dev && nf.max_abs < 0.15);
        assert!(noise_floor(1000, 1, &mut r).is_err());
    }

    #[test]
    fn single_pair_recovers_exactly() {
        let curve = bundle_recovery_curve(1000, 3, 5, &mut rng(14)).unwrap();
        assert_eq!(curve[0].mean, 1.0);
        assert_eq!(curve[0].min, 1.0);
    }

    #[test]
    fn majority_similarity_values() {
        assert_eq!(majority_similarity(1), 1.0);
        assert_eq!(majority_similarity(3), 0.5);
        assert!((majority_similarity(5) - 0.375).abs() < 1e-12);
        // Stirling limit sqrt(2 / (pi b))
        let b = 401;
        let approx = (2.0 / (std::f64::consts::PI * b as f64)).sqrt();
        assert!((majority_similarity(b) - approx).abs() / approx < 0.01);
    }

    #[test]
    fn packed_hex_round_trip_and_errors() {
        let v = hv(&[1, -1, -1, 1, 1, 1, -1, -1, 1, -1]);
        let packed = v.to_packed_hex();
        assert_eq!(packed, "10:3901");
        assert_eq!(Hypervector::from_packed_hex(&packed).unwrap(), v);
        assert!(Hypervector::from_packed_hex("10:39").is_err());
        assert!(Hypervector::from_packed_hex("10:39ff").is_err());
        assert!(Hypervector::from_packed_hex("3901").is_err());
    }

    #[test]
    fn json_round_trip_and_validation() {
        let v = hv(&[1, -1, 1]);
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, "[1,-1,1]");
        assert_eq!(serde_json::from_str::<Hypervector>(&json).unwrap(), v);
        assert!(serde_json::from_str::<Hypervector>("[1,0,1]").is_err());
    }

    #[test]
    fn superposition_clip_odd_is_majority() {
        let a = hv(&[1, 1, -1, -1]);
        let b = hv(&[1, -1, 1, -1]);
        let c = hv(&[1, -1, -1, 1]);
        let mut s = Superposition::new(4).unwrap();
        for v in [&a, &b, &c] {
            s.add(v).unwrap();
        }
        assert_eq!(s.sums(), &[3, -1, -1, -1]);
        assert_eq!(s.clip(&mut rng(0)).unwrap().as_slice(), &[1, -1, -1, -1]);
    }
}
