use crate::circuit::Circuit;
use crate::error::Result;
use crate::lattice::LatticeSpec;
use crate::linalg::CMatrix;
use crate::rng::SimRng;
use crate::sampling::chain::chain_sample;
use crate::sampling::marginal::SqueezedMarginals;
use crate::sampling::truncation::TruncationPolicy;

/// Per-sublattice sampler: sublattice α sees only its own source, propagated through the
/// full circuit and restricted to the modes of α. Correlations between sublattices are
/// dropped, which is exactly the block-diagonal approximation of the output covariance.
#[derive(Debug, Clone)]
pub struct ApproxSampler {
    sublattices: Vec<Vec<usize>>,
    models: Vec<SqueezedMarginals>,
    modes: usize,
    pub policy: TruncationPolicy,
}

impl ApproxSampler {
    pub fn new(circuit: &Circuit, layout: &LatticeSpec, r: f64, policy: TruncationPolicy) -> Result<Self> {
        circuit.validate()?;
        let models = layout
            .sublattices
            .iter()
            .zip(&layout.sources)
            .map(|(sub, &s)| {
                let col = circuit.propagate_column(s);
                let t = CMatrix::from_fn(sub.len(), 1, |i, _| col[sub[i]]);
                SqueezedMarginals::new(t, &[r])
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ApproxSampler { sublattices: layout.sublattices.clone(), models, modes: layout.modes, policy })
    }

    pub fn models(&self) -> &[SqueezedMarginals] {
        &self.models
    }

    pub fn sublattices(&self) -> &[Vec<usize>] {
        &self.sublattices
    }

    pub fn sample(&self, rng: &mut SimRng) -> Result<Vec<usize>> {
        let mut counts = vec![0; self.modes];
        for (sub, model) in self.sublattices.iter().zip(&self.models) {
            let local = chain_sample(model, &self.policy, rng)?;
            for (&m, n) in sub.iter().zip(local) {
                counts[m] = n;
            }
        }
        Ok(counts)
    }
}

pub fn approx_sublattice_sample(
    circuit: &Circuit,
    layout: &LatticeSpec,
    r: f64,
    policy: &TruncationPolicy,
    rng: &mut SimRng,
) -> Result<Vec<usize>> {
    ApproxSampler::new(circuit, layout, r, *policy)?.sample(rng)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::sample_random_circuit;
    use crate::lattice::build_lattice;
    use crate::rng::substream;
    use crate::sampling::truncation::truncation_threshold;

    #[test]
    fn zero_depth_only_sources_emit() {
        let l = build_lattice(1, 3, 3).unwrap();
        let c = sample_random_circuit(&l, 0, &mut substream(1, 0));
        let s = ApproxSampler::new(&c, &l, 1.0, truncation_threshold(3, 1.0, 1e-6).unwrap()).unwrap();
        let mut rng = substream(1, 1);
        let mut seen_photons = false;
        for _ in 0..300 {
            let x = s.sample(&mut rng).unwrap();
            for (j, &n) in x.iter().enumerate() {
                if !l.sources.contains(&j) {
                    assert_eq!(n, 0);
                } else {
                    assert_eq!(n % 2, 0);
                    seen_photons |= n > 0;
                }
            }
        }
        assert!(seen_photons);
    }

    #[test]
    fn large_lattice_builds_quickly() {
        let l = build_lattice(1, 4, 16).unwrap();
        let c = sample_random_circuit(&l, 16, &mut substream(2, 0));
        let s = ApproxSampler::new(&c, &l, 0.5, truncation_threshold(4, 0.5, 1e-6).unwrap()).unwrap();
        let x = s.sample(&mut substream(2, 1)).unwrap();
        assert_eq!(x.len(), 64);
    }
}
