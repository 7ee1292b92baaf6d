//! Random brickwork circuits of beam splitters and the mode unitary they implement.
//!
//! Layer `l` acts along axis `(l / 2) % d`. Along that axis, even layers pair coordinates
//! `(1,2), (3,4), …` and odd layers pair `(0,1), (2,3), …`; an unpaired edge mode is left
//! alone. Starting with the odd pairing keeps a centred source (offset `⌊L/2⌋`) inside its
//! own cube for as long as the cube geometry allows.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use rand::Rng;
use serde::{Deserialize, Serialize};
use serde_json::value::RawValue;

use crate::error::{Error, Result};
use crate::lattice::{build_lattice, LatticeSpec};
use crate::linalg::{CMatrix, C64, ONE, ZERO};
use crate::rng::SimRng;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamSplitterGate {
    pub modes: (usize, usize),
    pub theta: f64,
    pub phi: f64,
    pub layer: usize,
}

impl BeamSplitterGate {
    pub fn matrix(&self) -> [[C64; 2]; 2] {
        beam_splitter_unitary(self.theta, self.phi)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Circuit {
    pub layout: LatticeSpec,
    pub layers: Vec<Vec<BeamSplitterGate>>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeUnitary {
    pub u: CMatrix,
}

/// `[[cos θ, e^{iφ} sin θ], [−e^{−iφ} sin θ, cos θ]]`.
pub fn beam_splitter_unitary(theta: f64, phi: f64) -> [[C64; 2]; 2] {
    let (s, c) = theta.sin_cos();
    let e = C64::from_polar(1.0, phi);
    [[C64::new(c, 0.0), e * s], [-e.conj() * s, C64::new(c, 0.0)]]
}

/// Mode pairs of brickwork layer `layer`, ascending by lower mode index.
pub fn brickwork_pairs(layout: &LatticeSpec, layer: usize) -> Vec<(usize, usize)> {
    let axis = (layer / 2) % layout.dim;
    let offset = if layer.is_multiple_of(2) { 1 } else { 0 };
    let stride = layout.stride(axis);
    let extent = layout.extents[axis];
    let mut pairs = Vec::new();
    for m in 0..layout.modes {
        let c = (m / stride) % extent;
        if c >= offset && (c - offset).is_multiple_of(2) && c + 1 < extent {
            pairs.push((m, m + stride));
        }
    }
    pairs
}

/// Draws a depth-`depth` brickwork circuit with every θ, φ uniform on `[0, 2π)`.
///
/// Angles are drawn layer by layer, gate by gate, θ before φ.
pub fn sample_random_circuit(layout: &LatticeSpec, depth: usize, rng: &mut SimRng) -> Circuit {
    let layers = (0..depth)
        .map(|l| {
            brickwork_pairs(layout, l)
                .into_iter()
                .map(|modes| {
                    let theta = rng.random_range(0.0..TAU);
                    let phi = rng.random_range(0.0..TAU);
                    BeamSplitterGate { modes, theta, phi, layer: l }
                })
                .collect()
        })
        .collect();
    Circuit { layout: layout.clone(), layers, seed: None }
}

impl Circuit {
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    pub fn modes(&self) -> usize {
        self.layout.modes
    }

    pub fn gates(&self) -> impl Iterator<Item = &BeamSplitterGate> {
        self.layers.iter().flatten()
    }

    /// Checks gate locality, disjointness within layers and angle ranges.
    pub fn validate(&self) -> Result<()> {
        let mut used = vec![usize::MAX; self.modes()];
        for (l, layer) in self.layers.iter().enumerate() {
            for g in layer {
                let (a, b) = g.modes;
                if a >= self.modes() || b >= self.modes() {
                    return Err(Error::MalformedCircuit(format!(
                        "gate ({a},{b}) in layer {l} outside {} modes",
                        self.modes()
                    )));
                }
                if !self.layout.are_neighbors(a, b) {
                    return Err(Error::MalformedCircuit(format!(
                        "gate ({a},{b}) in layer {l} is not nearest-neighbour"
                    )));
                }
                for m in [a, b] {
                    if used[m] == l {
                        return Err(Error::MalformedCircuit(format!("mode {m} used twice in layer {l}")));
                    }
                    used[m] = l;
                }
                for (name, x) in [("theta", g.theta), ("phi", g.phi)] {
                    if !(0.0..TAU).contains(&x) {
                        return Err(Error::MalformedCircuit(format!("{name}={x} in layer {l} outside [0, 2π)")));
                    }
                }
            }
        }
        Ok(())
    }

    /// Applies every gate to the rows of `m` (`m ← U m`).
    pub fn apply_to_rows(&self, m: &mut CMatrix) {
        for g in self.gates() {
            let [[g00, g01], [g10, g11]] = g.matrix();
            let (i, j) = g.modes;
            for col in 0..m.ncols() {
                let (x, y) = (m[(i, col)], m[(j, col)]);
                m[(i, col)] = g00 * x + g01 * y;
                m[(j, col)] = g10 * x + g11 * y;
            }
        }
    }

    /// Column `source` of the mode unitary, in `O(gates)` time.
    pub fn propagate_column(&self, source: usize) -> Vec<C64> {
        let mut v = vec![ZERO; self.modes()];
        v[source] = ONE;
        for g in self.gates() {
            let [[g00, g01], [g10, g11]] = g.matrix();
            let (i, j) = g.modes;
            let (x, y) = (v[i], v[j]);
            v[i] = g00 * x + g01 * y;
            v[j] = g10 * x + g11 * y;
        }
        v
    }

    pub fn to_json(&self) -> Result<String> {
        let fmt = |x: f64| RawValue::from_string(format!("{x:.16e}")).map_err(Error::from);
        let layers = self
            .layers
            .iter()
            .map(|layer| {
                layer
                    .iter()
                    .map(|g| Ok(GateRecord { modes: [g.modes.0, g.modes.1], theta: fmt(g.theta)?, phi: fmt(g.phi)? }))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let rec = CircuitRecord {
            d: self.layout.dim,
            n: self.layout.n_sources,
            l: self.layout.edge,
            depth: self.depth(),
            seed: self.seed,
            layers,
        };
        Ok(serde_json::to_string(&rec)?)
    }

    pub fn from_json(text: &str) -> Result<Circuit> {
        let rec: CircuitRecord = serde_json::from_str(text)?;
        if rec.layers.len() != rec.depth {
            return Err(Error::MalformedCircuit(format!("depth {} but {} layers", rec.depth, rec.layers.len())));
        }
        let layout = build_lattice(rec.d, rec.n, rec.l)?;
        let layers = rec
            .layers
            .iter()
            .enumerate()
            .map(|(l, layer)| {
                layer
                    .iter()
                    .map(|g| {
                        Ok(BeamSplitterGate {
                            modes: (g.modes[0], g.modes[1]),
                            theta: serde_json::from_str(g.theta.get())?,
                            phi: serde_json::from_str(g.phi.get())?,
                            layer: l,
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        let c = Circuit { layout, layers, seed: rec.seed };
        c.validate()?;
        Ok(c)
    }
}

#[derive(Serialize, Deserialize)]
struct GateRecord {
    modes: [usize; 2],
    theta: Box<RawValue>,
    phi: Box<RawValue>,
}

#[derive(Serialize, Deserialize)]
struct CircuitRecord {
    d: usize,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "L")]
    l: usize,
    depth: usize,
    seed: Option<u64>,
    layers: Vec<Vec<GateRecord>>,
}

/// Mode unitary `U` with `a_out = U a_in`; later layers multiply on the left.
pub fn accumulate_unitary(circuit: &Circuit) -> Result<ModeUnitary> {
    circuit.validate()?;
    let mut u = CMatrix::identity(circuit.modes(), circuit.modes());
    circuit.apply_to_rows(&mut u);
    Ok(ModeUnitary { u })
}

impl ModeUnitary {
    pub fn dim(&self) -> usize {
        self.u.nrows()
    }

    /// `‖U†U − 𝟙‖_max`.
    pub fn unitarity_defect(&self) -> f64 {
        let n = self.dim();
        let d = self.u.adjoint() * &self.u - CMatrix::identity(n, n);
        d.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn column(&self, s: usize) -> Vec<C64> {
        self.u.column(s).iter().copied().collect()
    }

    /// Entrywise `|U_jk|²`.
    pub fn intensities(&self) -> DMatrix<f64> {
        self.u.map(|z| z.norm_sqr())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    fn pairs(layout: &LatticeSpec, depth: usize) -> Vec<Vec<(usize, usize)>> {
        (0..depth).map(|l| brickwork_pairs(layout, l)).collect()
    }

    #[test]
    fn beam_splitter_examples() {
        let id = beam_splitter_unitary(0.0, 1.234);
        assert_eq!(id, [[ONE, ZERO], [ZERO, ONE]]);
        let sw = beam_splitter_unitary(std::f64::consts::FRAC_PI_2, 0.0);
        assert!((sw[0][1] - ONE).norm() < 1e-15 && (sw[1][0] + ONE).norm() < 1e-15);
        assert!(sw[0][0].norm() < 1e-15 && sw[1][1].norm() < 1e-15);
        let mut rng = substream(1, 0);
        for _ in 0..100 {
            let g = beam_splitter_unitary(rng.random_range(0.0..TAU), rng.random_range(0.0..TAU));
            let m = CMatrix::from_fn(2, 2, |i, j| g[i][j]);
            let d = &m * m.adjoint() - CMatrix::identity(2, 2);
            assert!(d.iter().all(|z| z.norm() < 1e-12));
        }
    }

    #[test]
    fn brickwork_alternates_in_1d() {
        let l = build_lattice(1, 1, 4).unwrap();
        assert_eq!(pairs(&l, 3), vec![vec![(1, 2)], vec![(0, 1), (2, 3)], vec![(1, 2)]]);
        let odd = build_lattice(1, 1, 5).unwrap();
        assert_eq!(pairs(&odd, 2), vec![vec![(1, 2), (3, 4)], vec![(0, 1), (2, 3)]]);
    }

    #[test]
    fn brickwork_uses_two_layers_per_axis() {
        let l = build_lattice(2, 1, 3).unwrap();
        let p = pairs(&l, 4);
        assert_eq!(p[0], vec![(3, 6), (4, 7), (5, 8)]);
        assert_eq!(p[1], vec![(0, 3), (1, 4), (2, 5)]);
        assert_eq!(p[2], vec![(1, 2), (4, 5), (7, 8)]);
        assert_eq!(p[3], vec![(0, 1), (3, 4), (6, 7)]);
    }

    #[test]
    fn empty_circuit_gives_identity() {
        let l = build_lattice(1, 2, 3).unwrap();
        let c = sample_random_circuit(&l, 0, &mut substream(3, 0));
        assert_eq!(c.depth(), 0);
        assert_eq!(accumulate_unitary(&c).unwrap().u, CMatrix::identity(6, 6));
    }

    #[test]
    fn same_seed_same_circuit() {
        let l = build_lattice(1, 1, 4).unwrap();
        let a = sample_random_circuit(&l, 2, &mut substream(11, 0));
        let b = sample_random_circuit(&l, 2, &mut substream(11, 0));
        assert_eq!(a, b);
        let c = sample_random_circuit(&l, 2, &mut substream(12, 0));
        assert_ne!(a, c);
    }

    #[test]
    fn single_gate_embeds_exactly() {
        let l = build_lattice(1, 1, 2).unwrap();
        let g = BeamSplitterGate { modes: (0, 1), theta: 0.7, phi: 2.1, layer: 0 };
        let c = Circuit { layout: l, layers: vec![vec![g]], seed: None };
        let u = accumulate_unitary(&c).unwrap().u;
        let b = beam_splitter_unitary(0.7, 2.1);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(u[(i, j)], b[i][j]);
            }
        }
    }

    #[test]
    fn random_unitary_columns_are_normalised() {
        let l = build_lattice(1, 1, 4).unwrap();
        let c = sample_random_circuit(&l, 6, &mut substream(5, 0));
        let u = accumulate_unitary(&c).unwrap();
        for s in 0..4 {
            let n: f64 = u.column(s).iter().map(|z| z.norm_sqr()).sum();
            assert!((n - 1.0).abs() < 1e-12);
        }
        assert!(u.unitarity_defect() < 1e-12);
    }

    #[test]
    fn later_layers_multiply_on_the_left() {
        let l = build_lattice(1, 1, 3).unwrap();
        let g1 = BeamSplitterGate { modes: (1, 2), theta: 0.3, phi: 0.4, layer: 0 };
        let g2 = BeamSplitterGate { modes: (0, 1), theta: 1.1, phi: 2.0, layer: 1 };
        let c = Circuit { layout: l, layers: vec![vec![g1], vec![g2]], seed: None };
        let embed = |g: &BeamSplitterGate| {
            let mut m = CMatrix::identity(3, 3);
            let b = g.matrix();
            let (i, j) = g.modes;
            m[(i, i)] = b[0][0];
            m[(i, j)] = b[0][1];
            m[(j, i)] = b[1][0];
            m[(j, j)] = b[1][1];
            m
        };
        let expect = embed(&g2) * embed(&g1);
        let u = accumulate_unitary(&c).unwrap().u;
        assert!((u - expect).iter().all(|z| z.norm() < 1e-15));
    }

    #[test]
    fn propagated_column_matches_unitary() {
        let l = build_lattice(2, 2, 3).unwrap();
        let c = sample_random_circuit(&l, 7, &mut substream(9, 0));
        let u = accumulate_unitary(&c).unwrap();
        for s in [0, 4, 17] {
            let v = c.propagate_column(s);
            for j in 0..l.modes {
                assert!((v[j] - u.u[(j, s)]).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn overlapping_gates_rejected() {
        let l = build_lattice(1, 1, 3).unwrap();
        let g = |a, b| BeamSplitterGate { modes: (a, b), theta: 0.1, phi: 0.2, layer: 0 };
        let bad = Circuit { layout: l.clone(), layers: vec![vec![g(0, 1), g(1, 2)]], seed: None };
        assert!(matches!(accumulate_unitary(&bad), Err(Error::MalformedCircuit(_))));
        let far = Circuit { layout: l.clone(), layers: vec![vec![g(0, 2)]], seed: None };
        assert!(far.validate().is_err());
        let mut angle = g(0, 1);
        angle.theta = TAU;
        let a = Circuit { layout: l, layers: vec![vec![angle]], seed: None };
        assert!(a.validate().is_err());
    }

    #[test]
    fn json_round_trip_is_exact() {
        let l = build_lattice(2, 2, 2).unwrap();
        let mut c = sample_random_circuit(&l, 5, &mut substream(21, 0));
        c.seed = Some(21);
        let text = c.to_json().unwrap();
        let back = Circuit::from_json(&text).unwrap();
        assert_eq!(back, c);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["N"], 2);
        assert_eq!(v["L"], 2);
        assert_eq!(v["depth"], 5);
        assert_eq!(v["layers"][0][0]["modes"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn light_cone_is_strict_in_1d() {
        let l = build_lattice(1, 1, 16).unwrap();
        for depth in 0..8 {
            let c = sample_random_circuit(&l, depth, &mut substream(depth as u64, 0));
            let u = accumulate_unitary(&c).unwrap().u;
            for s in 0..16 {
                for j in 0..16usize {
                    if j.abs_diff(s) > depth {
                        assert_eq!(u[(j, s)], ZERO);
                    }
                }
            }
        }
    }
}
