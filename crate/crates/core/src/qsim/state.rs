use num_complex::Complex64;
use rand::Rng;

use super::gate::{Block1, Block2, Gate};
use super::pauli::PauliString;
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Dense amplitude vector over `n_qubits` qubits. Qubit 0 is the least
/// significant bit of the amplitude index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// The all-zero computational basis state.
    pub fn zero(n_qubits: usize) -> Self {
        Self::basis(n_qubits, 0)
    }

    pub fn basis(n_qubits: usize, index: usize) -> Self {
        let mut amps = vec![ZERO; 1 << n_qubits];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n_qubits, amps }
    }

    /// Wraps an amplitude vector, checking its length and normalization.
    pub fn from_amplitudes(n_qubits: usize, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != 1 << n_qubits {
            return Err(Error::InvalidState(format!(
                "{} amplitudes for {n_qubits} qubits",
                amps.len()
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("squared norm {norm}")));
        }
        Ok(Self { n_qubits, amps })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalized(n_qubits: usize, mut amps: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0) || !norm.is_finite() {
            return Err(Error::InvalidState("cannot normalize a zero vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(n_qubits, amps)
    }

    /// Haar-like random state from Gaussian amplitudes.
    pub fn random<R: Rng + ?Sized>(n_qubits: usize, rng: &mut R) -> Self {
        let amps = (0..1usize << n_qubits)
            .map(|_| {
                let (u1, u2): (f64, f64) = (rng.gen::<f64>().max(1e-300), rng.gen());
                let r = (-2.0 * u1.ln()).sqrt();
                let t = std::f64::consts::TAU * u2;
                Complex64::new(r * t.cos(), r * t.sin())
            })
            .collect();
        Self::normalized(n_qubits, amps).expect("Gaussian vector is nonzero")
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Self) -> Result<Complex64> {
        self.check_size(other.n_qubits)?;
        Ok(self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum())
    }

    /// Tensor product `|ancilla> ⊗ |self>` with the new qubits on top.
    pub fn extended(&self, extra_qubits: usize) -> Self {
        let mut amps = vec![ZERO; 1 << (self.n_qubits + extra_qubits)];
        amps[..self.amps.len()].copy_from_slice(&self.amps);
        Self { n_qubits: self.n_qubits + extra_qubits, amps }
    }

    fn check_size(&self, n: usize) -> Result<()> {
        if n != self.n_qubits {
            return Err(Error::SizeMismatch { expected: self.n_qubits, got: n });
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        gate.validate(self.n_qubits)?;
        self.apply_unchecked(gate);
        Ok(())
    }

    pub fn apply_all(&mut self, gates: &[Gate]) -> Result<()> {
        gates.iter().try_for_each(|g| self.apply_gate(g))
    }

    /// Applies a gate already validated against this register size.
    pub(crate) fn apply_unchecked(&mut self, gate: &Gate) {
        match gate {
            Gate::PauliRotation { generator, angle } => self.rotate(generator, *angle),
            Gate::Cnot { control, target } => self.cnot(*control, *target),
            Gate::Unitary1(b) => self.block1(b),
            Gate::Unitary2(b) => self.block2(b),
        }
    }

    /// Multiplies the state by a Pauli string (which is unitary).
    pub fn apply_pauli(&mut self, p: &PauliString) -> Result<()> {
        self.check_size(p.n_qubits())?;
        let x = p.x_mask() as usize;
        let mut out = vec![ZERO; self.amps.len()];
        for (b, a) in self.amps.iter().enumerate() {
            out[b ^ x] = p.basis_coefficient(b) * a;
        }
        self.amps = out;
        Ok(())
    }

    fn rotate(&mut self, p: &PauliString, angle: f64) {
        if angle == 0.0 {
            return;
        }
        if p.x_mask() == 0 && p.z_mask() == 0 {
            let phase = (Complex64::new(0.0, -angle / 2.0) * p.basis_coefficient(0)).exp();
            self.amps.iter_mut().for_each(|a| *a *= phase);
            return;
        }
        let (s, c) = (angle / 2.0).sin_cos();
        let mis = Complex64::new(0.0, -s);
        let x = p.x_mask() as usize;
        if x == 0 {
            for (b, a) in self.amps.iter_mut().enumerate() {
                *a *= c + mis * p.basis_coefficient(b);
            }
            return;
        }
        let pivot = 1usize << x.trailing_zeros();
        for b in 0..self.amps.len() {
            if b & pivot != 0 {
                continue;
            }
            let b2 = b ^ x;
            let (a1, a2) = (self.amps[b], self.amps[b2]);
            self.amps[b] = c * a1 + mis * p.basis_coefficient(b2) * a2;
            self.amps[b2] = c * a2 + mis * p.basis_coefficient(b) * a1;
        }
    }

    fn cnot(&mut self, control: usize, target: usize) {
        let (cm, tm) = (1usize << control, 1usize << target);
        for b in 0..self.amps.len() {
            if b & cm != 0 && b & tm == 0 {
                self.amps.swap(b, b | tm);
            }
        }
    }

    fn block1(&mut self, g: &Block1) {
        let m = &g.matrix;
        let qm = 1usize << g.qubit;
        for b in 0..self.amps.len() {
            if b & qm != 0 {
                continue;
            }
            let (a0, a1) = (self.amps[b], self.amps[b | qm]);
            self.amps[b] = m[0][0] * a0 + m[0][1] * a1;
            self.amps[b | qm] = m[1][0] * a0 + m[1][1] * a1;
        }
    }

    fn block2(&mut self, g: &Block2) {
        let [qa, qb] = g.qubits();
        let (ma, mb) = (1usize << qa, 1usize << qb);
        let (lo, hi) = (qa.min(qb), qa.max(qb));
        let m = g.matrix();
        let quarter = self.amps.len() >> 2;
        if g.is_excitation_preserving() {
            let (d0, d3) = (m[0][0], m[3][3]);
            for k in 0..quarter {
                let i = insert_zero(insert_zero(k, lo), hi);
                self.amps[i] *= d0;
                self.amps[i | ma | mb] *= d3;
                let (i01, i10) = (i | mb, i | ma);
                let (a1, a2) = (self.amps[i01], self.amps[i10]);
                self.amps[i01] = m[1][1] * a1 + m[1][2] * a2;
                self.amps[i10] = m[2][1] * a1 + m[2][2] * a2;
            }
            return;
        }
        for k in 0..quarter {
            let i = insert_zero(insert_zero(k, lo), hi);
            let idx = [i, i | mb, i | ma, i | ma | mb];
            let v = idx.map(|j| self.amps[j]);
            for r in 0..4 {
                self.amps[idx[r]] = m[r][0] * v[0] + m[r][1] * v[1] + m[r][2] * v[2] + m[r][3] * v[3];
            }
        }
    }

    /// `<ψ|P|ψ>` as a complex number (real for Hermitian `P`).
    pub fn expectation_complex(&self, p: &PauliString) -> Result<Complex64> {
        self.check_size(p.n_qubits())?;
        let x = p.x_mask() as usize;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(b, a)| self.amps[b ^ x].conj() * p.basis_coefficient(b) * a)
            .sum())
    }

    /// `<ψ|P|ψ>` for a Hermitian Pauli string.
    pub fn expectation_pauli(&self, p: &PauliString) -> Result<f64> {
        if !p.is_hermitian() {
            return Err(Error::NonRealPhase);
        }
        Ok(self.expectation_complex(p)?.re)
    }

    /// One projective measurement of a Hermitian Pauli string.
    pub fn sample_pauli_outcome<R: Rng + ?Sized>(&self, p: &PauliString, rng: &mut R) -> Result<i8> {
        let e = self.expectation_pauli(p)?;
        let plus = ((1.0 + e) / 2.0).clamp(0.0, 1.0);
        Ok(if rng.gen::<f64>() < plus { 1 } else { -1 })
    }

    /// Probability that qubit `q` reads 0.
    pub fn prob_zero(&self, q: usize) -> Result<f64> {
        if q >= self.n_qubits {
            return Err(Error::QubitOutOfRange { index: q, n_qubits: self.n_qubits });
        }
        let m = 1usize << q;
        Ok(self.amps.iter().enumerate().filter(|(b, _)| b & m == 0).map(|(_, a)| a.norm_sqr()).sum())
    }

    /// Samples one computational-basis index.
    pub fn sample_basis<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let mut u = rng.gen::<f64>() * self.norm_sqr();
        for (b, a) in self.amps.iter().enumerate() {
            u -= a.norm_sqr();
            if u < 0.0 {
                return b;
            }
        }
        // Rounding left a sliver of probability; fall back to the last
        // basis state with nonzero weight.
        self.amps.iter().rposition(|a| a.norm_sqr() > 0.0).unwrap_or(0)
    }
}

#[inline]
fn insert_zero(k: usize, q: usize) -> usize {
    let low = k & ((1 << q) - 1);
    ((k >> q) << (q + 1)) | low
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qsim::gate::{kron, pauli_matrix};
    use crate::qsim::pauli::Pauli;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type Dense = Vec<Vec<Complex64>>;

    fn eye(d: usize) -> Dense {
        (0..d)
            .map(|i| (0..d).map(|j| Complex64::new((i == j) as u8 as f64, 0.0)).collect())
            .collect()
    }

    /// Brute-force embedding of a local operator through explicit Kronecker
    /// products, independent of the bit-twiddling kernels.
    fn embed(n: usize, ops: &[(usize, [[Complex64; 2]; 2])]) -> Dense {
        let mut m: Dense = vec![vec![Complex64::new(1.0, 0.0)]];
        for q in 0..n {
            let f = ops.iter().find(|(qq, _)| *qq == q).map(|(_, f)| *f).unwrap_or(pauli_matrix(Pauli::I));
            let d = m.len();
            let mut out = vec![vec![ZERO; 2 * d]; 2 * d];
            for i in 0..2 {
                for j in 0..2 {
                    for a in 0..d {
                        for b in 0..d {
                            out[i * d + a][j * d + b] = f[i][j] * m[a][b];
                        }
                    }
                }
            }
            m = out;
        }
        m
    }

    fn add(a: &Dense, b: &Dense, s: Complex64) -> Dense {
        a.iter().zip(b).map(|(r, t)| r.iter().zip(t).map(|(x, y)| x + s * y).collect()).collect()
    }

    fn apply_dense(m: &Dense, v: &[Complex64]) -> Vec<Complex64> {
        m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
    }

    fn dense_gate(n: usize, g: &Gate) -> Dense {
        let one = Complex64::new(1.0, 0.0);
        let proj0 = [[one, ZERO], [ZERO, ZERO]];
        let proj1 = [[ZERO, ZERO], [ZERO, one]];
        match g {
            Gate::PauliRotation { generator, angle } => {
                let ops: Vec<_> =
                    generator.support().iter().map(|&q| (q, pauli_matrix(generator.get(q)))).collect();
                let p = embed(n, &ops);
                let (s, c) = (angle / 2.0).sin_cos();
                let sign = generator.sign().unwrap();
                let scaled: Dense = eye(1 << n)
                    .iter()
                    .map(|r| r.iter().map(|x| x * c).collect())
                    .collect();
                add(&scaled, &p, Complex64::new(0.0, -s * sign))
            }
            Gate::Cnot { control, target } => {
                let a = embed(n, &[(*control, proj0)]);
                let b = embed(n, &[(*control, proj1), (*target, pauli_matrix(Pauli::X))]);
                add(&a, &b, one)
            }
            Gate::Unitary1(b) => embed(n, &[(b.qubit, b.matrix)]),
            Gate::Unitary2(b) => {
                let [qa, qb] = b.qubits();
                let mut total = vec![vec![ZERO; 1 << n]; 1 << n];
                // Expand the 4x4 matrix in the basis of elementary 2x2 units.
                for i in 0..4 {
                    for j in 0..4 {
                        let mut ea = [[ZERO; 2]; 2];
                        let mut eb = [[ZERO; 2]; 2];
                        ea[i >> 1][j >> 1] = one;
                        eb[i & 1][j & 1] = one;
                        let term = embed(n, &[(qa, ea), (qb, eb)]);
                        total = add(&total, &term, b.matrix()[i][j]);
                    }
                }
                total
            }
        }
    }

    fn random_gate(n: usize, rng: &mut ChaCha8Rng) -> Gate {
        let kind = rng.gen_range(0..4);
        let q0 = rng.gen_range(0..n);
        let mut q1 = rng.gen_range(0..n - 1);
        if q1 >= q0 {
            q1 += 1;
        }
        match kind {
            0 => {
                let labels = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
                let factors: Vec<_> = (0..n).map(|q| (q, labels[rng.gen_range(0..4)])).collect();
                let mut p = PauliString::from_factors(n, &factors).unwrap();
                if rng.gen_bool(0.5) {
                    p = p.negated();
                }
                Gate::rotation(p, rng.gen_range(-3.0..3.0)).unwrap()
            }
            1 => Gate::Cnot { control: q0, target: q1 },
            2 => {
                let labels = [Pauli::X, Pauli::Y, Pauli::Z];
                let rots = (0..3)
                    .map(|_| {
                        let p = PauliString::from_factors(
                            n,
                            &[(q0, labels[rng.gen_range(0..3)]), (q1, labels[rng.gen_range(0..3)])],
                        )
                        .unwrap();
                        (p, rng.gen_range(-2.0..2.0))
                    })
                    .collect();
                Gate::Unitary2(Block2::from_rotations([q0, q1], rots).unwrap())
            }
            _ => {
                let t = rng.gen_range(-2.0..2.0);
                let p = [Pauli::X, Pauli::Y, Pauli::Z][rng.gen_range(0..3)];
                let mut m = pauli_matrix(p);
                let (s, c) = (t / 2.0f64).sin_cos();
                for (i, row) in m.iter_mut().enumerate() {
                    for (j, x) in row.iter_mut().enumerate() {
                        *x = *x * Complex64::new(0.0, -s) + if i == j { Complex64::new(c, 0.0) } else { ZERO };
                    }
                }
                Gate::Unitary1(Block1 { qubit: q0, matrix: m })
            }
        }
    }

    #[test]
    fn trivial_gates() {
        let mut s = StateVector::basis(2, 0b01);
        s.apply_gate(&Gate::Cnot { control: 0, target: 1 }).unwrap();
        assert_eq!(s, StateVector::basis(2, 0b11));
        let before = StateVector::random(3, &mut ChaCha8Rng::seed_from_u64(1));
        let mut after = before.clone();
        after.apply_gate(&Gate::rz(3, 0, 0.0).unwrap()).unwrap();
        assert_eq!(before, after);
        assert!(s.apply_gate(&Gate::Cnot { control: 0, target: 2 }).is_err());
    }

    #[test]
    fn trivial_expectations() {
        let z0 = PauliString::single(3, 0, Pauli::Z).unwrap();
        assert_eq!(StateVector::zero(3).expectation_pauli(&z0).unwrap(), 1.0);
        let mut bell = StateVector::zero(2);
        bell.apply_gate(&Gate::hadamard(0)).unwrap();
        bell.apply_gate(&Gate::Cnot { control: 0, target: 1 }).unwrap();
        let zz: PauliString = "ZZ".parse().unwrap();
        assert!((bell.expectation_pauli(&zz).unwrap() - 1.0).abs() < 1e-14);
        assert!(bell.expectation_pauli(&"iZZ".parse().unwrap()).is_err());
        assert!(bell.expectation_pauli(&z0).is_err());
    }

    #[test]
    fn sampling_is_unbiased() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let z: PauliString = "Z".parse().unwrap();
        let zero = StateVector::zero(1);
        assert!((0..100).all(|_| zero.sample_pauli_outcome(&z, &mut rng).unwrap() == 1));
        let mut plus = StateVector::zero(1);
        plus.apply_gate(&Gate::hadamard(0)).unwrap();
        let n = 100_000;
        let mean = (0..n).map(|_| plus.sample_pauli_outcome(&z, &mut rng).unwrap() as f64).sum::<f64>() / n as f64;
        assert!(mean.abs() < 3.0 / (n as f64).sqrt());

        let psi = StateVector::random(4, &mut rng);
        let p: PauliString = "XZIY".parse().unwrap();
        let exact = psi.expectation_pauli(&p).unwrap();
        let mean = (0..n).map(|_| psi.sample_pauli_outcome(&p, &mut rng).unwrap() as f64).sum::<f64>() / n as f64;
        assert!((mean - exact).abs() < 3.0 * ((1.0 - exact * exact) / n as f64).sqrt());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn gate_matches_dense_kernel(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 4;
            let psi = StateVector::random(n, &mut rng);
            let g = random_gate(n, &mut rng);
            let want = apply_dense(&dense_gate(n, &g), psi.amplitudes());
            let mut got = psi.clone();
            got.apply_gate(&g).unwrap();
            for (a, b) in got.amplitudes().iter().zip(&want) {
                prop_assert!((a - b).norm() < 1e-12);
            }
        }

        #[test]
        fn circuits_preserve_norm(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 5;
            let mut psi = StateVector::random(n, &mut rng);
            for _ in 0..30 {
                let g = random_gate(n, &mut rng);
                psi.apply_gate(&g).unwrap();
                prop_assert!((psi.norm_sqr() - 1.0).abs() < 1e-10);
            }
        }

        #[test]
        fn expectation_matches_dense(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 5;
            let psi = StateVector::random(n, &mut rng);
            let mut qs: Vec<usize> = (0..n).collect();
            for i in 0..3 {
                let j = rng.gen_range(i..n);
                qs.swap(i, j);
            }
            let labels = [Pauli::X, Pauli::Y, Pauli::Z];
            let ops: Vec<_> = qs[..3].iter().map(|&q| (q, labels[rng.gen_range(0..3)])).collect();
            let p = PauliString::from_factors(n, &ops).unwrap();
            let dense = embed(n, &ops.iter().map(|&(q, l)| (q, pauli_matrix(l))).collect::<Vec<_>>());
            let mv = apply_dense(&dense, psi.amplitudes());
            let want: Complex64 = psi.amplitudes().iter().zip(&mv).map(|(a, b)| a.conj() * b).sum();
            prop_assert!((psi.expectation_pauli(&p).unwrap() - want.re).abs() < 1e-12);
        }
    }

    #[test]
    fn kron_places_first_factor_on_first_qubit() {
        let one = Complex64::new(1.0, 0.0);
        let m = kron(&pauli_matrix(Pauli::Z), &[[one, ZERO], [ZERO, one]]);
        let g = Gate::Unitary2(Block2::from_matrix([1, 0], m));
        let mut s = StateVector::basis(2, 0b10);
        s.apply_gate(&g).unwrap();
        assert_eq!(s.amplitudes()[0b10], -one);
    }
}
