//! Group convolution on ℍ¹ against the kernel semigroup, left invariance
//! of the fields and the group law written out by hand.

use anisoheat::asymptotics::identity_table;
use anisoheat::heisenberg::{h_convolve, HGridFunction};
use anisoheat::kernels::{heisenberg_on_grid, GroupKernel, HField, KernelTable, SigmaQuadrature, TableSpec};
use anisoheat::{Grid, PolyGaussian, Result, ScalarField};

/// `θ`-part of `v⁻¹∘w` on ℍ¹ with `(z,θ)∘(z',θ') = (z+z', θ+θ'+2(z₂z'₁ − z₁z'₂))`.
fn inverse_times_theta(v: &[f64], w: &[f64]) -> f64 {
    w[2] - v[2] - 2.0 * (v[1] * w[0] - v[0] * w[1])
}

struct Fixed(PolyGaussian);

impl GroupKernel for Fixed {
    fn n(&self) -> usize {
        1
    }

    fn eval(&self, z: &[f64], theta: f64, _t: f64) -> Result<f64> {
        Ok(self.0.eval(&[z[0], z[1], theta]))
    }

    fn check_reach(&self, _z_max: f64, _theta_max: f64, _t: f64) -> Result<()> {
        Ok(())
    }
}

fn bump(rates: [f64; 3], centers: [f64; 3], linear: f64) -> PolyGaussian {
    PolyGaussian::new(vec![(1.0, vec![0, 0, 0]), (linear, vec![1, 0, 0])], rates.to_vec(), centers.to_vec()).unwrap()
}

#[test]
fn heat_kernel_semigroup() {
    let quad = SigmaQuadrature::standard(1).unwrap();
    let src = Grid::new(vec![6.0, 6.0, 24.0], vec![24, 24, 48]).unwrap();
    let h1 = HGridFunction::new(heisenberg_on_grid(HField::Identity, &src, 1.0, &quad).unwrap()).unwrap();
    let out = Grid::new(vec![6.0, 6.0, 12.0], vec![12, 12, 12]).unwrap();
    let u = h_convolve(&h1, &*identity_table(1).unwrap(), 1.0, &out).unwrap();
    let exact = heisenberg_on_grid(HField::Identity, &out, 2.0, &quad).unwrap();
    let rel = u.data().sub(&exact).unwrap().max_abs() / exact.max_abs();
    assert!(rel < 1e-3, "H_1 ∗ H_1 vs H_2: {rel:e}");
}

#[test]
fn left_invariant_fields_pass_through_convolution() {
    let f = bump([2.0, 2.5, 1.5], [0.2, -0.1, 0.3], 0.5);
    let src = Grid::cube(3, 3.0, 24).unwrap();
    let fg = HGridFunction::sample(&f, &src).unwrap();
    let quad_table = |field| {
        let mut t = KernelTable::new(1, field, TableSpec::default()).unwrap();
        t.certify(1e-12).unwrap();
        t
    };
    let t = 1.0;
    let h = 0.05;
    // 8 nodes of spacing h; node 4 sits on the center
    let center = [0.4, -0.3, 0.5];
    let out = Grid::with_center(vec![4.0 * h; 3], vec![8; 3], center.to_vec()).unwrap();
    let u = h_convolve(&fg, &*identity_table(1).unwrap(), t, &out).unwrap();
    let strides = out.strides();
    let at = |i: [usize; 3]| u.data().values()[i[0] * strides[0] + i[1] * strides[1] + i[2] * strides[2]];
    let d = |axis: usize| {
        let mut lo = [4, 4, 4];
        let mut hi = [4, 4, 4];
        lo[axis] = 3;
        hi[axis] = 5;
        (at(hi) - at(lo)) / (2.0 * h)
    };
    // Z₁ = ∂₁ + 2z₂∂θ, Z₂ = ∂₂ − 2z₁∂θ, Θ = ∂θ
    let z1_fd = d(0) + 2.0 * center[1] * d(2);
    let z2_fd = d(1) - 2.0 * center[0] * d(2);
    let theta_fd = d(2);
    for (field, fd) in [(HField::Z(0), z1_fd), (HField::Z(1), z2_fd), (HField::Theta, theta_fd)] {
        let conv = h_convolve(&fg, &quad_table(field), t, &out).unwrap();
        let direct = conv.data().values()[4 * strides[0] + 4 * strides[1] + 4 * strides[2]];
        let scale = conv.data().max_abs();
        assert!((direct - fd).abs() < 5e-3 * scale, "{field:?}: f∗PH = {direct}, P(f∗H) = {fd}");
    }
}

#[test]
fn convolution_is_not_commutative() {
    let f = bump([2.0, 1.5, 1.0], [0.5, 0.0, 0.2], 0.8);
    let g = bump([1.5, 2.0, 1.2], [-0.3, 0.4, -0.1], -0.6);
    let src = Grid::cube(3, 5.0, 40).unwrap();
    let out = Grid::new(vec![2.0, 2.0, 2.0], vec![8, 8, 8]).unwrap();
    let fg = h_convolve(&HGridFunction::sample(&f, &src).unwrap(), &Fixed(g.clone()), 1.0, &out).unwrap();
    let gf = h_convolve(&HGridFunction::sample(&g, &src).unwrap(), &Fixed(f.clone()), 1.0, &out).unwrap();

    // direct sum of f(v) g(v⁻¹∘w) with the group law written out here
    let h = src.cell_volume();
    let mut v = [0.0; 3];
    let mut worst: f64 = 0.0;
    for idx in [0usize, 100, 273, 511] {
        let w = out.coords(idx);
        let mut acc = 0.0;
        for i in 0..src.len() {
            src.coords_into(i, &mut v);
            let arg = [w[0] - v[0], w[1] - v[1], inverse_times_theta(&v, &w)];
            acc += f.eval(&v) * g.eval(&arg);
        }
        acc *= h;
        worst = worst.max((acc - fg.data().values()[idx]).abs());
    }
    let scale = fg.data().max_abs();
    assert!(worst < 1e-8 * scale, "f∗g against the written-out group law: {worst:e}");
    let diff = fg.data().sub(gf.data()).unwrap().max_abs();
    assert!(diff > 1e-2 * scale, "f∗g and g∗f agree to {diff:e}");
}

#[test]
fn convolution_with_a_point_mass_at_the_identity_is_a_translate() {
    // a narrow f of unit mass at a point p: f ∗ H_t ≈ H_t(p⁻¹∘w)
    let p = [0.5, -0.25, 0.5];
    let a = 400.0;
    let mass = (std::f64::consts::PI / a).powf(1.5);
    let f = PolyGaussian::new(vec![(1.0 / mass, vec![0, 0, 0])], vec![a; 3], p.to_vec()).unwrap();
    let src = Grid::with_center(vec![0.25; 3], vec![20; 3], p.to_vec()).unwrap();
    let fg = HGridFunction::sample(&f, &src).unwrap();
    let out = Grid::new(vec![3.0, 3.0, 6.0], vec![8, 8, 8]).unwrap();
    let u = h_convolve(&fg, &*identity_table(1).unwrap(), 1.0, &out).unwrap();
    let quad = SigmaQuadrature::standard(1).unwrap();
    let mut worst: f64 = 0.0;
    let mut peak: f64 = 0.0;
    for i in 0..out.len() {
        let w = out.coords(i);
        let e = anisoheat::kernels::heisenberg_kernel_t(&[w[0] - p[0], w[1] - p[1]], inverse_times_theta(&p, &w), 1.0, &quad)
            .unwrap();
        worst = worst.max((u.data().values()[i] - e).abs());
        peak = peak.max(e.abs());
    }
    // the Gaussian has width 0.035; the error is its second moment against ∇²H
    assert!(worst < 2e-2 * peak, "{worst:e} vs peak {peak:e}");
}
