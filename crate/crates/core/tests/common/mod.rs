//! Property checks shared by the property tests and the acceptance run.

#![allow(dead_code)]

use std::f64::consts::TAU;

use num_complex::Complex64;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

use chiral_wgm::cqed::semiclassical_transmission_at;
use chiral_wgm::model::*;
use chiral_wgm::numerics::{hermitian_eigen, kron, nullspace_hermitian_pair, CMatrix};
use chiral_wgm::spt::{spt_power, SptInput};
use chiral_wgm::tm::matrix_path::{self, SiteElement};
use chiral_wgm::tm::*;

pub const FSR: f64 = TAU * 3e12;

pub fn geometry() -> RingGeometry {
    RingGeometry::new(10.5e-6, 1.5, FSR, TAU * 300e12).unwrap()
}

/// Rates (in Hz/2π), probe detuning and emitter offset (in units of κ_tot).
#[derive(Debug, Clone, Copy)]
pub struct Draw {
    pub kappa_in_hz: f64,
    pub kappa_ex_hz: f64,
    pub gamma_hz: f64,
    pub emitter_decay_hz: f64,
    pub h_hz: f64,
    pub qe_offset: f64,
    pub delta1: f64,
}

pub fn draws() -> impl Strategy<Value = Draw> {
    (
        1e9..100e9f64,
        1e9..100e9f64,
        1e6..1e9f64,
        prop_oneof![Just(0.0), 0.0..2e9f64],
        prop_oneof![Just(0.0), 0.0..400e9f64],
        prop_oneof![Just(0.0), -5.0..5.0f64],
        -20.0..20.0f64,
    )
        .prop_map(|(ki, ke, g, big_g, h, off, d)| Draw {
            kappa_in_hz: ki,
            kappa_ex_hz: ke,
            gamma_hz: g,
            emitter_decay_hz: big_g,
            h_hz: h,
            qe_offset: off,
            delta1: d,
        })
}

impl Draw {
    pub fn config(&self, direction: Direction, form: BridgeForm) -> SystemConfig {
        let geo = geometry();
        let ktot = TAU * (self.kappa_in_hz + self.kappa_ex_hz);
        let rates = RateSet::bridged(
            TAU * self.kappa_in_hz,
            TAU * self.kappa_ex_hz,
            TAU * self.gamma_hz,
            EmitterSpec::Decay(TAU * self.emitter_decay_hz),
            BackscatterSpec::Rate(TAU * self.h_hz),
            geo.resonance() + self.qe_offset * ktot,
            geo.fsr(),
        )
        .unwrap();
        SystemConfig::new(geo, rates, 0.1, direction, -1.0, form).unwrap()
    }

    pub fn detuning(&self, config: &SystemConfig) -> f64 {
        self.delta1 * config.rates.kappa_tot()
    }
}

pub fn run<S: Strategy>(
    cases: u32,
    strategy: S,
    test: impl Fn(S::Value) -> Result<(), TestCaseError>,
) -> Result<(), String> {
    let mut runner = TestRunner::new(Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    });
    runner.run(&strategy, test).map_err(|e| e.to_string())
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), TestCaseError> {
    if cond {
        Ok(())
    } else {
        Err(TestCaseError::fail(msg()))
    }
}

pub const PASSIVITY_SLACK: f64 = 1e-12;

/// `0 ≤ T ≤ 1` for the three closed-form descriptions.
pub fn passivity(d: Draw) -> Result<(), TestCaseError> {
    for form in [BridgeForm::Exact, BridgeForm::FirstOrder] {
        let c = d.config(Direction::Forward, form);
        let x = d.detuning(&c);
        let values = [
            ("tm", tm_transmission(&c, x).unwrap().norm_sqr()),
            ("spt", spt_power(&SptInput::from_config(&c, x)).unwrap()),
            ("semiclassical", semiclassical_transmission_at(&c, x).unwrap().norm_sqr()),
        ];
        for (name, t) in values {
            ensure((-PASSIVITY_SLACK..=1.0 + PASSIVITY_SLACK).contains(&t), || {
                format!("{name}: T = {t} for {d:?}")
            })?;
        }
    }
    Ok(())
}

/// Transport amplitude and semiclassical steady state with `σ_z = −1`
/// coincide.
pub fn transport_identity(d: Draw) -> Result<(), TestCaseError> {
    let c = d.config(Direction::Forward, BridgeForm::Exact);
    let x = d.detuning(&c);
    let a = spt_power(&SptInput::from_config(&c, x)).unwrap();
    let b = semiclassical_transmission_at(&c, x).unwrap().norm_sqr();
    ensure((a - b).abs() < 1e-12, || format!("spt {a} vs semiclassical {b} for {d:?}"))
}

/// Backward spectrum of a configuration equals the forward spectrum of the
/// same configuration without the emitter.
pub fn chirality(d: Draw) -> Result<(), TestCaseError> {
    let back = d.config(Direction::Backward, BridgeForm::Exact);
    let bare = Draw {
        emitter_decay_hz: 0.0,
        ..d
    }
    .config(Direction::Forward, BridgeForm::Exact);
    let x = d.detuning(&back);
    let pairs = [
        (tm_transmission(&back, x).unwrap().norm_sqr(), tm_transmission(&bare, x).unwrap().norm_sqr()),
        (
            spt_power(&SptInput::from_config(&back, x)).unwrap(),
            spt_power(&SptInput::from_config(&bare, x)).unwrap(),
        ),
        (
            semiclassical_transmission_at(&back, x).unwrap().norm_sqr(),
            semiclassical_transmission_at(&bare, x).unwrap().norm_sqr(),
        ),
    ];
    for (a, b) in pairs {
        ensure((a - b).abs() <= 1e-14, || format!("backward {a} vs bare forward {b} for {d:?}"))?;
    }
    Ok(())
}

/// Ring parameters for the transfer-matrix properties.
#[derive(Debug, Clone, Copy)]
pub struct RingDraw {
    pub theta1: f64,
    pub theta2: f64,
    pub alpha1: f64,
    pub alpha2: f64,
    pub t: f64,
    pub epsilon: f64,
    pub delta2: f64,
    pub gamma: f64,
    pub emitter_decay: f64,
}

pub fn ring_draws() -> impl Strategy<Value = RingDraw> {
    (
        -3.2..3.2f64,
        -3.2..3.2f64,
        0.5..1.0f64,
        0.5..1.0f64,
        0.05..0.95f64,
        0.0..1.5f64,
        -5.0..5.0f64,
        0.01..2.0f64,
        0.0..5.0f64,
    )
        .prop_map(|(theta1, theta2, alpha1, alpha2, t, epsilon, delta2, gamma, emitter_decay)| RingDraw {
            theta1,
            theta2,
            alpha1,
            alpha2,
            t,
            epsilon,
            delta2,
            gamma,
            emitter_decay,
        })
}

impl RingDraw {
    fn theta(&self) -> f64 {
        self.theta1 + self.theta2
    }

    fn alpha(&self) -> f64 {
        self.alpha1 * self.alpha2
    }

    fn t_qe(&self) -> Complex64 {
        qe_transmission(self.delta2, self.gamma, self.emitter_decay).unwrap()
    }

    fn scatterer(&self) -> ScattererCoefficients {
        ScattererCoefficients::from_strength(self.epsilon).unwrap()
    }
}

/// Explicit matrix composition reproduces the four closed forms.
pub fn matrix_path_equivalence(r: RingDraw) -> Result<(), TestCaseError> {
    let coupler = CouplerCoefficients::new(r.t, 1.0).unwrap();
    let (theta, alpha) = (r.theta(), r.alpha());
    let sc = r.scatterer();
    let tq = r.t_qe();
    let cases = [
        (SiteElement::Empty, transmission_case1(theta, r.t, alpha).unwrap()),
        (SiteElement::Scatterer(sc), transmission_case2(theta, r.t, alpha, &sc).unwrap()),
        (SiteElement::Emitter(tq), transmission_case3(theta, r.t, alpha, tq).unwrap()),
        (
            SiteElement::EmitterAndScatterer(sc, tq),
            transmission_case4(theta, r.t, alpha, &sc, tq).unwrap(),
        ),
    ];
    for (site, closed) in cases {
        let path = matrix_path::transmission(&coupler, r.theta1, r.theta2, r.alpha1, r.alpha2, site).unwrap();
        ensure((path - closed).norm() < 1e-12, || {
            format!("{site:?}: matrix path {path} vs closed form {closed} for {r:?}")
        })?;
    }
    Ok(())
}

/// Switching off the scatterer or the emitter collapses the richer cases
/// onto the simpler ones.
pub fn reduction_lattice(r: RingDraw) -> Result<(), TestCaseError> {
    let (theta, t, alpha) = (r.theta(), r.t, r.alpha());
    let none = ScattererCoefficients::from_strength(0.0).unwrap();
    let one = Complex64::new(1.0, 0.0);
    let sc = r.scatterer();
    let tq = r.t_qe();
    let pairs = [
        ("2 -> 1", transmission_case2(theta, t, alpha, &none).unwrap(), transmission_case1(theta, t, alpha).unwrap()),
        ("3 -> 1", transmission_case3(theta, t, alpha, one).unwrap(), transmission_case1(theta, t, alpha).unwrap()),
        (
            "4 -> 3",
            transmission_case4(theta, t, alpha, &none, tq).unwrap(),
            transmission_case3(theta, t, alpha, tq).unwrap(),
        ),
        (
            "4 -> 2",
            transmission_case4(theta, t, alpha, &sc, one).unwrap(),
            transmission_case2(theta, t, alpha, &sc).unwrap(),
        ),
    ];
    for (name, a, b) in pairs {
        ensure((a - b).norm() < 1e-14, || format!("reduction {name}: {a} vs {b} for {r:?}"))?;
    }
    Ok(())
}

/// Coupler and scatterer conserve energy.
pub fn unitarity(r: RingDraw) -> Result<(), TestCaseError> {
    let c = CouplerCoefficients::new(r.t, r.alpha()).unwrap();
    let (t, k) = (c.t(), c.kappa_c());
    ensure((t * t + k * k - 1.0).abs() < 1e-12, || format!("coupler |t|²+|κ|² for {r:?}"))?;
    let sc = r.scatterer();
    // S = [[t_s, r_s], [r_s, t_s]]; S†S = 1
    let diag = sc.t_s.norm_sqr() + sc.r_s.norm_sqr();
    let off = sc.t_s.conj() * sc.r_s + sc.r_s.conj() * sc.t_s;
    ensure((diag - 1.0).abs() < 1e-12 && off.norm() < 1e-12, || {
        format!("scatterer S†S deviates: diag {diag}, off {off} for {r:?}")
    })?;
    // the modulator never amplifies
    ensure(r.t_qe().norm() <= 1.0 + 1e-12, || format!("|t_qe| > 1 for {r:?}"))
}

/// Parameter bridges invert each other.
pub fn bridge_round_trip(r: RingDraw) -> Result<(), TestCaseError> {
    let coupler = CouplerCoefficients::new(r.t.max(0.5), r.alpha()).unwrap();
    let (kin, kex) = bridge_coupler_to_rates(&coupler, FSR).unwrap();
    let back = rates_to_coupler(kin, kex, FSR, BridgeForm::Exact).unwrap();
    ensure(
        (back.t() - coupler.t()).abs() < 1e-12 && (back.alpha() - coupler.alpha()).abs() < 1e-12,
        || format!("coupler round trip {coupler:?} -> {back:?}"),
    )?;

    // the emitter bridge needs κ_tot < 2F
    let ktot = (kin + kex).min(FSR);
    let decay = r.emitter_decay * 1e9;
    let g = bridge_emitter(decay, FSR, ktot).unwrap();
    let decay_back = emitter_decay_from_coupling(g, FSR, ktot).unwrap();
    ensure((decay_back - decay).abs() <= 1e-12 * decay.max(1.0), || {
        format!("emitter round trip {decay} -> {decay_back}")
    })?;

    let h = bridge_scatterer(r.epsilon, FSR).unwrap();
    let eps_back = scatterer_strength_from_rate(h, FSR).unwrap();
    ensure((eps_back - r.epsilon).abs() < 1e-12, || format!("scatterer round trip {} -> {eps_back}", r.epsilon))?;

    let tq = r.t_qe();
    let pa = qe_phase_amplitude(tq).unwrap();
    ensure((pa.recompose() - tq).norm() < 1e-12, || format!("phase/amplitude round trip {tq}"))
}

/// `T(Δ₁) = T(−Δ₁)` when the emitter sits on the cavity resonance.
pub fn evenness(d: Draw) -> Result<(), TestCaseError> {
    let d = Draw { qe_offset: 0.0, ..d };
    let c = d.config(Direction::Forward, BridgeForm::Exact);
    let x = d.detuning(&c);
    let f = |x: f64| {
        [
            tm_transmission(&c, x).unwrap().norm_sqr(),
            spt_power(&SptInput::from_config(&c, x)).unwrap(),
            semiclassical_transmission_at(&c, x).unwrap().norm_sqr(),
        ]
    };
    for (a, b) in f(x).into_iter().zip(f(-x)) {
        ensure((a - b).abs() < 1e-12, || format!("T({x}) = {a} but T(-x) = {b} for {d:?}"))?;
    }
    Ok(())
}

fn complex_entries(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    proptest::collection::vec((-1.0..1.0f64, -1.0..1.0f64).prop_map(|(r, i)| Complex64::new(r, i)), n)
}

fn matrix(rows: usize, cols: usize, data: Vec<Complex64>) -> CMatrix {
    CMatrix::from_vec(rows, cols, data).unwrap()
}

/// Three small random matrices with independent shapes.
pub fn kron_triples() -> impl Strategy<Value = [CMatrix; 3]> {
    proptest::collection::vec((1usize..4, 1usize..4), 3).prop_flat_map(|shapes| {
        let s = shapes.clone();
        (
            complex_entries(s[0].0 * s[0].1),
            complex_entries(s[1].0 * s[1].1),
            complex_entries(s[2].0 * s[2].1),
        )
            .prop_map(move |(a, b, c)| {
                [
                    matrix(shapes[0].0, shapes[0].1, a),
                    matrix(shapes[1].0, shapes[1].1, b),
                    matrix(shapes[2].0, shapes[2].1, c),
                ]
            })
    })
}

/// `(A ⊗ B) ⊗ C = A ⊗ (B ⊗ C)`.
pub fn kron_associativity(m: [CMatrix; 3]) -> Result<(), TestCaseError> {
    let [a, b, c] = &m;
    let left = kron(&kron(a, b).unwrap(), c).unwrap();
    let right = kron(a, &kron(b, c).unwrap()).unwrap();
    let diff = left.max_abs_diff(&right);
    ensure(diff < 1e-13, || format!("kron associativity off by {diff}"))
}

/// Random Hermitian matrices of dimension up to `max_dim`.
pub fn hermitian(max_dim: usize) -> impl Strategy<Value = CMatrix> {
    (1usize..=max_dim).prop_flat_map(|n| {
        complex_entries(n * n).prop_map(move |v| {
            let m = matrix(n, n, v);
            m.add(&m.adjoint()).unwrap()
        })
    })
}

/// `‖M v − λ v‖ < 1e-10 ‖M‖` for every eigenpair.
pub fn eigen_residual(m: CMatrix) -> Result<(), TestCaseError> {
    let evd = hermitian_eigen(&m).unwrap();
    let scale = m.norm_fro().max(f64::MIN_POSITIVE);
    for (k, &lambda) in evd.values.iter().enumerate() {
        let v = evd.vector(k);
        let mv = m.matvec(&v);
        let r = mv
            .iter()
            .zip(&v)
            .map(|(x, y)| (x - lambda * y).norm_sqr())
            .sum::<f64>()
            .sqrt();
        ensure(r < 1e-10 * scale, || format!("eigenpair {k} residual {r} for dim {}", m.rows()))?;
    }
    Ok(())
}

/// `L = P diag(0, s₂, …) Q` with unitary `P`, `Q` has the known null vector
/// `Q† e₁`; the recovered vector must match it up to a phase.
pub fn planted_null_vector(input: (CMatrix, CMatrix, Vec<f64>)) -> Result<(), TestCaseError> {
    let (h1, h2, sv) = input;
    let p = hermitian_eigen(&h1).unwrap().vectors;
    let q = hermitian_eigen(&h2).unwrap().vectors;
    let n = p.rows();
    let mut diag = vec![Complex64::new(0.0, 0.0)];
    diag.extend(sv.iter().take(n - 1).map(|&s| Complex64::new(s, 0.0)));
    let l = p.matmul(&CMatrix::from_diag(&diag)).unwrap().matmul(&q).unwrap();
    let planted: Vec<Complex64> = (0..n).map(|i| q[(0, i)].conj()).collect();
    let v = nullspace_hermitian_pair(&l).unwrap();
    let overlap: Complex64 = planted.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
    let phase = overlap / overlap.norm();
    let err = planted
        .iter()
        .zip(&v)
        .map(|(a, b)| (a * phase - b).norm_sqr())
        .sum::<f64>()
        .sqrt();
    ensure(err < 1e-9, || format!("null vector off by {err} (dim {n})"))
}

pub fn planted_inputs() -> impl Strategy<Value = (CMatrix, CMatrix, Vec<f64>)> {
    (2usize..=16).prop_flat_map(|n| {
        (
            complex_entries(n * n),
            complex_entries(n * n),
            proptest::collection::vec(0.1..10.0f64, n - 1),
        )
            .prop_map(move |(a, b, s)| {
                let a = matrix(n, n, a);
                let b = matrix(n, n, b);
                (a.add(&a.adjoint()).unwrap(), b.add(&b.adjoint()).unwrap(), s)
            })
    })
}
