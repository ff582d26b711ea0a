//! Clustering-based sampling of fixed-length event sequences.
//!
//! The matched event stream of a chunk is cut into tumbling windows of `h`
//! events. Each window becomes an IDF-weighted event-count vector; windows are
//! clustered by iterated hierarchical agglomerative clustering on random
//! subsets, and a quota of windows is drawn from every cluster so that rare
//! sequence types are still represented.

use std::collections::BTreeMap;

use rand::seq::index;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    /// Window length.
    pub h: usize,
    /// Share of windows drawn per clustering round.
    pub xi: f64,
    /// Linkage and assignment distance threshold.
    pub theta: f64,
    /// Number of sampled windows requested.
    pub m: usize,
    /// Assumed proportion of a minority sequence type, used for the minimum
    /// draw size.
    pub p: f64,
    pub max_iterations: usize,
    /// Draw size used when no `k` satisfies the minimum-draw inequality.
    pub k_ceiling: usize,
    /// Use `min(xi*N, k_min)` for the draw size instead of `max`.
    pub strict_min_draw: bool,
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig {
            h: 20,
            xi: 0.01,
            theta: 4.0,
            m: 16,
            p: 0.03,
            max_iterations: 10,
            k_ceiling: 64,
            strict_min_draw: false,
        }
    }
}

impl SamplerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.h == 0 {
            return Err(Error::parameter("window length h must be at least 1"));
        }
        if !(self.xi > 0.0 && self.xi <= 1.0) {
            return Err(Error::parameter("xi must be in (0, 1]"));
        }
        if self.theta.is_nan() || self.theta <= 0.0 {
            return Err(Error::parameter("theta must be positive"));
        }
        if self.m == 0 {
            return Err(Error::parameter("M must be at least 1"));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return Err(Error::parameter("p must be in (0, 1)"));
        }
        if self.k_ceiling < 2 {
            return Err(Error::parameter("k ceiling must be at least 2"));
        }
        Ok(())
    }
}

/// Event-frequency vector of one window.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceVector {
    pub window_index: usize,
    pub counts: Vec<f64>,
    pub weighted: Vec<f64>,
    /// `[start, end)` in matched-line positions.
    pub line_span: (usize, usize),
}

/// Cuts an event stream into tumbling windows of `h` events and counts
/// events per window over a vocabulary of `vocabulary` event ids. The final
/// window may be shorter. `weighted` is left equal to `counts`.
pub fn windows(event_ids: &[u32], h: usize, vocabulary: usize) -> Result<Vec<SequenceVector>> {
    if h == 0 {
        return Err(Error::parameter("window length h must be at least 1"));
    }
    let vocab = event_ids
        .iter()
        .map(|&e| e as usize + 1)
        .max()
        .unwrap_or(0)
        .max(vocabulary);
    Ok(event_ids
        .chunks(h)
        .enumerate()
        .map(|(i, w)| {
            let mut counts = vec![0.0; vocab];
            for &e in w {
                counts[e as usize] += 1.0;
            }
            SequenceVector {
                window_index: i,
                weighted: counts.clone(),
                counts,
                line_span: (i * h, i * h + w.len()),
            }
        })
        .collect())
}

/// `w(e) = ln(N / n_e)` where `n_e` is the number of windows containing `e`;
/// events absent from every window get weight 0.
pub fn idf_weights(window_counts: &[Vec<f64>]) -> Vec<f64> {
    let n = window_counts.len();
    let vocab = window_counts.iter().map(Vec::len).max().unwrap_or(0);
    let mut containing = vec![0usize; vocab];
    for counts in window_counts {
        for (e, &c) in counts.iter().enumerate() {
            if c > 0.0 {
                containing[e] += 1;
            }
        }
    }
    containing
        .into_iter()
        .map(|ne| if ne == 0 { 0.0 } else { (n as f64 / ne as f64).ln() })
        .collect()
}

/// Fills `weighted` with the element-wise product of counts and IDF weights.
pub fn apply_idf(vectors: &mut [SequenceVector]) {
    let counts: Vec<Vec<f64>> = vectors.iter().map(|v| v.counts.clone()).collect();
    let weights = idf_weights(&counts);
    for v in vectors {
        v.weighted = v.counts.iter().zip(&weights).map(|(c, w)| c * w).collect();
    }
}

/// Minimum draw size and whether it came from the ceiling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct KMin {
    pub k: usize,
    pub ceiling_hit: bool,
}

/// Largest `k` tried before giving up.
pub const K_SEARCH_LIMIT: usize = 1_000_000;

/// Smallest `k >= 2` with `C(k,2) p^(k-2) (1-p)^2 >= 1 - e^-6`, found by
/// direct iteration up to [`K_SEARCH_LIMIT`]. Returns `ceiling` flagged when no
/// such `k` exists.
pub fn k_min(p: f64, ceiling: usize) -> Result<KMin> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::parameter(format!("p = {p} is outside (0, 1)")));
    }
    let target = (1.0 - (-6.0f64).exp()).ln();
    let (ln_p, ln_q2) = (p.ln(), 2.0 * (1.0 - p).ln());
    for k in 2..=K_SEARCH_LIMIT {
        let kf = k as f64;
        let ln_term = (kf * (kf - 1.0) / 2.0).ln() + (kf - 2.0) * ln_p + ln_q2;
        if ln_term >= target {
            return Ok(KMin { k, ceiling_hit: false });
        }
        // term(k+1)/term(k) = p(k+1)/(k-1) only decreases with k, so once the
        // terms start shrinking no later k can reach the target
        if p * (kf + 1.0) / (kf - 1.0) < 1.0 {
            break;
        }
    }
    Ok(KMin {
        k: ceiling,
        ceiling_hit: true,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterAssignment {
    pub cluster_of: Vec<usize>,
    pub centers: Vec<Vec<f64>>,
    pub k: usize,
}

impl ClusterAssignment {
    pub fn members(&self) -> Vec<Vec<usize>> {
        let mut members = vec![Vec::new(); self.k];
        for (w, &c) in self.cluster_of.iter().enumerate() {
            members[c].push(w);
        }
        members
    }
}

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// Average-linkage agglomerative clustering cut at `theta`: clusters are
/// merged while the closest pair has linkage distance below `theta`.
/// Returns member lists in a deterministic order.
pub fn hac_average(points: &[&[f64]], theta: f64) -> Vec<Vec<usize>> {
    let n = points.len();
    let mut clusters: Vec<Option<Vec<usize>>> = (0..n).map(|i| Some(vec![i])).collect();
    let mut dist = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = euclidean(points[i], points[j]);
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }
    loop {
        let mut best: Option<(usize, usize, f64)> = None;
        for i in 0..n {
            if clusters[i].is_none() {
                continue;
            }
            for j in i + 1..n {
                if clusters[j].is_none() {
                    continue;
                }
                let d = dist[i][j];
                if best.is_none_or(|(_, _, bd)| d < bd) {
                    best = Some((i, j, d));
                }
            }
        }
        let Some((a, b, d)) = best else { break };
        if d >= theta {
            break;
        }
        let mb = clusters[b].take().unwrap();
        let ma = clusters[a].as_mut().unwrap();
        let (na, nb) = (ma.len() as f64, mb.len() as f64);
        ma.extend(mb);
        // Lance-Williams update for average linkage
        for k in 0..n {
            if k == a || clusters[k].is_none() {
                continue;
            }
            let merged = (na * dist[a][k] + nb * dist[b][k]) / (na + nb);
            dist[a][k] = merged;
            dist[k][a] = merged;
        }
    }
    let mut out: Vec<Vec<usize>> = clusters
        .into_iter()
        .flatten()
        .map(|mut m| {
            m.sort_unstable();
            m
        })
        .collect();
    out.sort_by_key(|m| m[0]);
    out
}

fn centroid(vectors: &[SequenceVector], members: &[usize]) -> Vec<f64> {
    let dim = vectors[members[0]].weighted.len();
    let mut c = vec![0.0; dim];
    for &m in members {
        for (acc, x) in c.iter_mut().zip(&vectors[m].weighted) {
            *acc += x;
        }
    }
    let n = members.len() as f64;
    c.iter_mut().for_each(|x| *x /= n);
    c
}

/// Size of the random subset clustered in each round.
pub fn draw_size(remaining: usize, total: usize, cfg: &SamplerConfig) -> Result<usize> {
    let by_rate = (cfg.xi * total as f64).ceil() as usize;
    let kmin = k_min(cfg.p, cfg.k_ceiling)?.k;
    let size = if cfg.strict_min_draw {
        by_rate.min(kmin)
    } else {
        by_rate.max(kmin)
    };
    Ok(size.max(1).min(remaining))
}

/// Iterative sample-cluster-match loop over window vectors.
///
/// Each round draws a random subset of the still-unassigned windows, clusters
/// it with average-linkage HAC cut at `theta`, and assigns every unassigned
/// window whose nearest new centroid is within `theta`. Windows still
/// unassigned after `max_iterations` rounds become singleton clusters.
pub fn cluster_sequences(vectors: &[SequenceVector], cfg: &SamplerConfig, seed: u64) -> Result<ClusterAssignment> {
    cfg.validate()?;
    let n = vectors.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cluster_of: Vec<Option<usize>> = vec![None; n];
    let mut centers: Vec<Vec<f64>> = Vec::new();
    let mut remaining: Vec<usize> = (0..n).collect();

    for _ in 0..cfg.max_iterations {
        if remaining.is_empty() {
            break;
        }
        let size = draw_size(remaining.len(), n, cfg)?;
        let mut drawn: Vec<usize> = index::sample(&mut rng, remaining.len(), size)
            .into_iter()
            .map(|i| remaining[i])
            .collect();
        drawn.sort_unstable();
        let points: Vec<&[f64]> = drawn.iter().map(|&w| vectors[w].weighted.as_slice()).collect();
        let first_new = centers.len();
        for group in hac_average(&points, cfg.theta) {
            let members: Vec<usize> = group.iter().map(|&g| drawn[g]).collect();
            let id = centers.len();
            centers.push(centroid(vectors, &members));
            for m in members {
                cluster_of[m] = Some(id);
            }
        }
        for &w in &remaining {
            if cluster_of[w].is_some() {
                continue;
            }
            let nearest = (first_new..centers.len())
                .map(|c| (c, euclidean(&vectors[w].weighted, &centers[c])))
                .fold(None::<(usize, f64)>, |acc, (c, d)| match acc {
                    Some((_, bd)) if bd <= d => acc,
                    _ => Some((c, d)),
                });
            if let Some((c, d)) = nearest {
                if d <= cfg.theta {
                    cluster_of[w] = Some(c);
                }
            }
        }
        remaining.retain(|&w| cluster_of[w].is_none());
    }
    for w in remaining {
        cluster_of[w] = Some(centers.len());
        centers.push(vectors[w].weighted.clone());
    }
    let k = centers.len();
    Ok(ClusterAssignment {
        cluster_of: cluster_of.into_iter().map(|c| c.expect("every window assigned")).collect(),
        centers,
        k,
    })
}

/// Draws `ceil(M / k)` windows per cluster, then tops up or trims so that the
/// result holds `min(total, max(k, M))` windows with every cluster
/// represented. Returns sorted window indices.
pub fn sample_sequences(assignment: &ClusterAssignment, m: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut members = assignment.members();
    members.retain(|c| !c.is_empty());
    if members.is_empty() {
        return Vec::new();
    }
    for c in &mut members {
        c.shuffle(&mut rng);
    }
    let k = members.len();
    let total: usize = members.iter().map(Vec::len).sum();
    let target = total.min(k.max(m));
    let quota = m.div_ceil(k);
    let mut take: Vec<usize> = members.iter().map(|c| c.len().min(quota).max(1)).collect();
    let mut taken: usize = take.iter().sum();

    // clusters ordered by size, largest first; ties by position
    let mut by_size: Vec<usize> = (0..k).collect();
    by_size.sort_by(|&a, &b| members[b].len().cmp(&members[a].len()).then(a.cmp(&b)));
    while taken < target {
        let before = taken;
        for &c in &by_size {
            if taken == target {
                break;
            }
            if take[c] < members[c].len() {
                take[c] += 1;
                taken += 1;
            }
        }
        if taken == before {
            break;
        }
    }
    while taken > target {
        let before = taken;
        for &c in &by_size {
            if taken == target {
                break;
            }
            if take[c] > 1 {
                take[c] -= 1;
                taken -= 1;
            }
        }
        if taken == before {
            break;
        }
    }
    let mut out: Vec<usize> = members
        .iter()
        .zip(&take)
        .flat_map(|(c, &t)| c[..t].iter().copied())
        .collect();
    out.sort_unstable();
    out
}

/// Summary of one sampling run, kept for reporting.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleOutcome {
    pub windows: usize,
    pub clusters: usize,
    pub sampled_windows: Vec<usize>,
    pub k_ceiling_hit: bool,
}

/// Full sampler: windows, IDF weighting, clustering and per-cluster draws.
/// Returns the sampled windows as matched-line spans.
pub fn sample_event_stream(event_ids: &[u32], vocabulary: usize, cfg: &SamplerConfig, seed: u64) -> Result<(Vec<(usize, usize)>, SampleOutcome)> {
    cfg.validate()?;
    let mut vectors = windows(event_ids, cfg.h, vocabulary)?;
    if vectors.is_empty() {
        return Ok((
            Vec::new(),
            SampleOutcome {
                windows: 0,
                clusters: 0,
                sampled_windows: Vec::new(),
                k_ceiling_hit: false,
            },
        ));
    }
    apply_idf(&mut vectors);
    let assignment = cluster_sequences(&vectors, cfg, seed)?;
    let sampled = sample_sequences(&assignment, cfg.m, seed.wrapping_add(1));
    let spans = sampled.iter().map(|&w| vectors[w].line_span).collect();
    let outcome = SampleOutcome {
        windows: vectors.len(),
        clusters: assignment.k,
        sampled_windows: sampled,
        k_ceiling_hit: k_min(cfg.p, cfg.k_ceiling)?.ceiling_hit,
    };
    Ok((spans, outcome))
}

/// Cluster sizes, largest first; handy for diagnostics.
pub fn cluster_sizes(assignment: &ClusterAssignment) -> Vec<usize> {
    let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
    for &c in &assignment.cluster_of {
        *counts.entry(c).or_default() += 1;
    }
    let mut sizes: Vec<usize> = counts.into_values().collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    sizes
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::Rng;

    fn binom_term(k: usize, p: f64) -> f64 {
        // independent evaluation with plain products
        let mut pk = 1.0;
        for _ in 0..k - 2 {
            pk *= p;
        }
        (k * (k - 1)) as f64 / 2.0 * pk * (1.0 - p) * (1.0 - p)
    }

    #[test]
    fn window_counts() {
        let ids: Vec<u32> = (0..100).map(|i| i % 3).collect();
        let w = windows(&ids, 20, 3).unwrap();
        assert_eq!(w.len(), 5);
        assert!(w.iter().all(|v| v.counts.iter().sum::<f64>() == 20.0));
        let w = windows(&[2], 20, 0).unwrap();
        assert_eq!(w.len(), 1);
        assert_eq!(w[0].counts, vec![0.0, 0.0, 1.0]);
        assert_eq!(w[0].line_span, (0, 1));
        let w = windows(&[1; 45], 20, 2).unwrap();
        for v in &w[..2] {
            assert_eq!(v.counts, vec![0.0, 20.0]);
        }
        assert_eq!(w[2].counts, vec![0.0, 5.0]);
        assert!(windows(&[], 20, 0).unwrap().is_empty());
        assert!(windows(&[1], 0, 0).is_err());
    }

    #[test]
    #[allow(clippy::approx_constant)]
    fn idf_values() {
        let mut counts = vec![vec![1.0, 0.0]; 10];
        counts[0][1] = 3.0;
        let w = idf_weights(&counts);
        assert_eq!(w[0], 0.0);
        assert!((w[1] - 10f64.ln()).abs() < 1e-12);
        assert!((w[1] - 2.3026).abs() < 1e-4);
        counts[1][1] = 1.0;
        let w2 = idf_weights(&counts);
        assert!(w2[1] < w[1]);
        let w3 = idf_weights(&[vec![1.0, 0.0, 0.0]]);
        assert_eq!(w3, vec![0.0, 0.0, 0.0]);
    }

    #[test]
    fn ubiquitous_event_has_zero_weight() {
        let ids: Vec<u32> = (0..200).map(|i| if i % 10 == 0 { 0 } else { 1 + (i % 7) }).collect();
        let mut v = windows(&ids, 20, 0).unwrap();
        apply_idf(&mut v);
        assert!(v.iter().all(|w| w.weighted[0] == 0.0));
    }

    #[test]
    fn k_min_small_p() {
        // (1 - 0.0005)^2 = 0.99900025 >= 1 - e^-6 = 0.997521...
        assert!(binom_term(2, 0.0005) >= 1.0 - (-6.0f64).exp());
        assert_eq!(k_min(0.0005, 64).unwrap(), KMin { k: 2, ceiling_hit: false });
    }

    #[test]
    fn k_min_degenerate_p_hits_ceiling() {
        assert_eq!(k_min(0.999, 64).unwrap(), KMin { k: 64, ceiling_hit: true });
        assert_eq!(k_min(0.03, 50).unwrap(), KMin { k: 50, ceiling_hit: true });
        assert!(k_min(0.0, 64).is_err());
        assert!(k_min(1.0, 64).is_err());
    }

    #[test]
    fn k_min_is_minimal_against_brute_force() {
        let threshold = 1.0 - (-6.0f64).exp();
        for i in 1..200 {
            let p = i as f64 / 200.0;
            let brute = (2..2000).find(|&k| binom_term(k, p) >= threshold);
            let got = k_min(p, 99).unwrap();
            match brute {
                Some(k) => {
                    assert_eq!(got.k, k, "p={p}");
                    if k > 2 {
                        assert!(binom_term(k - 1, p) < threshold);
                    }
                }
                None => assert!(got.ceiling_hit, "p={p}"),
            }
        }
    }

    fn vec_of(w: usize, v: Vec<f64>) -> SequenceVector {
        SequenceVector {
            window_index: w,
            counts: v.clone(),
            weighted: v,
            line_span: (w, w + 1),
        }
    }

    #[test]
    fn identical_windows_form_one_cluster() {
        let vs: Vec<_> = (0..50).map(|i| vec_of(i, vec![3.0, 1.0])).collect();
        let a = cluster_sequences(&vs, &SamplerConfig::default(), 1).unwrap();
        assert_eq!(a.k, 1);
        assert_eq!(a.centers.len(), 1);
    }

    #[test]
    fn separated_types_recovered() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let mut labels = Vec::new();
        let vs: Vec<_> = (0..300)
            .map(|i| {
                let label = usize::from(rng.gen_bool(0.2));
                labels.push(label);
                let base = if label == 0 { [20.0, 0.0] } else { [0.0, 20.0] };
                vec_of(i, vec![base[0] + rng.gen_range(-0.5..0.5), base[1] + rng.gen_range(-0.5..0.5)])
            })
            .collect();
        let a = cluster_sequences(&vs, &SamplerConfig::default(), 3).unwrap();
        assert_eq!(a.k, 2);
        let map0 = a.cluster_of[labels.iter().position(|&l| l == 0).unwrap()];
        for (w, &l) in labels.iter().enumerate() {
            assert_eq!(a.cluster_of[w] == map0, l == 0);
        }
    }

    #[test]
    fn huge_theta_collapses_everything() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let vs: Vec<_> = (0..100)
            .map(|i| vec_of(i, (0..5).map(|_| rng.gen_range(0.0..50.0)).collect()))
            .collect();
        let cfg = SamplerConfig {
            theta: 1e9,
            ..SamplerConfig::default()
        };
        assert_eq!(cluster_sequences(&vs, &cfg, 0).unwrap().k, 1);
    }

    #[test]
    fn clustering_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let vs: Vec<_> = (0..400)
            .map(|i| vec_of(i, (0..4).map(|_| rng.gen_range(0..4) as f64 * 3.0).collect()))
            .collect();
        let cfg = SamplerConfig::default();
        assert_eq!(cluster_sequences(&vs, &cfg, 11).unwrap(), cluster_sequences(&vs, &cfg, 11).unwrap());
    }

    fn assignment(sizes: &[usize]) -> ClusterAssignment {
        let mut cluster_of = Vec::new();
        for (c, &s) in sizes.iter().enumerate() {
            cluster_of.extend(std::iter::repeat_n(c, s));
        }
        ClusterAssignment {
            cluster_of,
            centers: vec![Vec::new(); sizes.len()],
            k: sizes.len(),
        }
    }

    #[test]
    fn quota_sampling_counts() {
        assert_eq!(sample_sequences(&assignment(&[10, 10, 10, 10]), 16, 0).len(), 16);
        assert_eq!(sample_sequences(&assignment(&[10]), 16, 0).len(), 10);
        assert_eq!(sample_sequences(&assignment(&[3; 20]), 16, 0).len(), 20);
        assert_eq!(sample_sequences(&assignment(&[1, 100]), 16, 0).len(), 16);
        assert_eq!(sample_sequences(&assignment(&[5, 5, 5]), 16, 0).len(), 15);
    }

    #[test]
    fn quota_sampling_covers_every_cluster() {
        let a = assignment(&[1, 50, 2, 7, 30, 1, 1]);
        let s = sample_sequences(&a, 16, 5);
        for c in 0..a.k {
            assert!(s.iter().any(|&w| a.cluster_of[w] == c));
        }
        assert_eq!(s, sample_sequences(&a, 16, 5));
    }

    proptest! {
        #[test]
        fn doubling_theta_never_adds_clusters(
            raw in prop::collection::vec(prop::collection::vec(0u8..6, 3), 2..60),
            theta in 0.5f64..6.0,
        ) {
            let vs: Vec<_> = raw.iter().enumerate()
                .map(|(i, v)| vec_of(i, v.iter().map(|&x| f64::from(x) * 2.0).collect()))
                .collect();
            // xi = 1 draws every window in the first round
            let cfg = SamplerConfig { xi: 1.0, theta, ..SamplerConfig::default() };
            let wide = SamplerConfig { theta: 2.0 * theta, ..cfg.clone() };
            let k1 = cluster_sequences(&vs, &cfg, 7).unwrap().k;
            let k2 = cluster_sequences(&vs, &wide, 7).unwrap().k;
            prop_assert!(k2 <= k1);
        }

        #[test]
        fn sample_size_rule(sizes in prop::collection::vec(1usize..30, 1..40), m in 1usize..40) {
            let a = assignment(&sizes);
            let s = sample_sequences(&a, m, 1);
            let total: usize = sizes.iter().sum();
            prop_assert_eq!(s.len(), total.min(sizes.len().max(m)));
            for c in 0..a.k {
                prop_assert!(s.iter().any(|&w| a.cluster_of[w] == c));
            }
        }
    }
}
