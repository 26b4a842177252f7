use std::f64::consts::PI;

use qudit_net::params::constants::{AMU, HBAR};
use qudit_net::params::couplings::{c_dd_bohr, couplings_dw};
use qudit_net::params::{
    contact_integral, dipolar_integral, dipolar_integral_real_space, solve_double_well, Barrier, Cloud, DoubleWellSpec,
    Grid, ModePair,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn potassium(barrier_hz: f64, points: usize) -> DoubleWellSpec {
    let mass = 39.0 * AMU;
    let omega_x = 2.0 * PI * 60.0;
    let ell = (HBAR / (mass * omega_x)).sqrt();
    DoubleWellSpec {
        mass,
        omega_x,
        omega_y: 2.0 * PI * 300.0,
        omega_z: 2.0 * PI * 400.0,
        barrier: Barrier::Gaussian { height: barrier_hz * 2.0 * PI * HBAR, width: 0.5 * ell },
        grid: Grid { x_min: -9.0 * ell, x_max: 9.0 * ell, n_points: points },
    }
}

#[test]
fn symmetric_wells_are_mirror_images() {
    let m = solve_double_well(&potassium(400.0, 512)).unwrap();
    let n = m.x.len();
    let peak = m.psi_l.iter().map(|a| a.abs()).fold(0.0, f64::max);
    let err = (0..n).map(|i| (m.psi_l[i] - m.psi_r[n - 1 - i]).abs()).fold(0.0, f64::max);
    assert!(err < 1e-8 * peak, "{err}");
    assert!(m.overlap().abs() < 1e-6);
    let left: f64 = (0..n).filter(|&i| m.x[i] < 0.0).map(|i| m.psi_l[i].powi(2)).sum::<f64>() * m.dx;
    assert!(left > 0.9);
}

#[test]
fn splitting_closes_with_barrier_height() {
    let mut last = f64::INFINITY;
    for h in [0.0, 100.0, 200.0, 400.0, 800.0, 1600.0] {
        let m = solve_double_well(&potassium(h, 512)).unwrap();
        let gap = m.e_ex - m.e_gs;
        assert!(gap > 0.0 && gap < last, "height {h}: {gap} vs {last}");
        last = gap;
    }
    assert!(last < 1e-3 * HBAR * 2.0 * PI * 60.0);
}

#[test]
fn contact_integral_of_gaussian_and_harmonic_modes() {
    let gauss = |sx: f64, sy: f64, sz: f64| {
        let grid = Grid { x_min: -12.0 * sx, x_max: 12.0 * sx, n_points: 801 };
        let x = grid.points();
        let psi: Vec<f64> = x.iter().map(|x| (-0.5 * (x / sx).powi(2)).exp() / (PI * sx * sx).powf(0.25)).collect();
        let m = ModePair {
            dx: grid.spacing(),
            psi_r: psi.clone(),
            psi_l: psi,
            x,
            sigma_y: sy,
            sigma_z: sz,
            e_gs: 0.0,
            e_ex: 0.0,
        };
        contact_integral(&m)
    };
    let (sx, sy, sz) = (1e-6, 2e-6, 0.5e-6);
    let i = gauss(sx, sy, sz);
    assert!((i * (2.0 * PI).powf(1.5) * sx * sy * sz - 1.0).abs() < 1e-12);
    assert!((gauss(2.0 * sx, 2.0 * sy, 2.0 * sz) / i - 0.125).abs() < 1e-12);

    // Zero barrier: psi_L = (phi_0 + phi_1) / sqrt(2), whose fourth-power integral is 4.75 sqrt(pi/2) / (4 pi) in units of ell.
    let mut spec = potassium(0.0, 512);
    spec.barrier = Barrier::None;
    let m = solve_double_well(&spec).unwrap();
    let ell = spec.length(spec.omega_x);
    let expected = 4.75 * (PI / 2.0).sqrt() / (4.0 * PI) / ell / (2.0 * PI * m.sigma_y * m.sigma_z);
    assert!((contact_integral(&m) / expected - 1.0).abs() < 1e-3);
}

/// Analytic density of `r - r'` for two Gaussian clouds.
fn gaussian_q(a: (f64, f64, f64), b: (f64, f64, f64), disp: [f64; 3]) -> impl Fn([f64; 3]) -> f64 {
    let var = [a.0 * a.0 + b.0 * b.0, a.1 * a.1 + b.1 * b.1, a.2 * a.2 + b.2 * b.2];
    move |u: [f64; 3]| {
        (0..3)
            .map(|k| {
                let d = u[k] + disp[k];
                (-0.5 * d * d / var[k]).exp() / (2.0 * PI * var[k]).sqrt()
            })
            .product()
    }
}

#[test]
fn anisotropic_pairs_agree_with_real_space_quadrature() {
    let cases = [
        ((0.3, 0.5, 0.8), (0.4, 0.3, 0.6), [1.5, 0.0, 0.0]),
        ((0.5, 0.4, 0.3), (0.5, 0.4, 0.3), [0.0, 0.0, 1.2]),
        ((0.6, 0.3, 0.5), (0.3, 0.5, 0.4), [0.7, 0.9, 0.4]),
    ];
    for (a, b, disp) in cases {
        let dx = 0.02;
        let ca = Cloud::gaussian(a.0, a.1, a.2, dx, 10.0);
        let cb = Cloud::gaussian(b.0, b.1, b.2, dx, 10.0);
        let momentum = dipolar_integral(&ca, &cb, disp).unwrap();
        let centre = [-disp[0], -disp[1], -disp[2]];
        let extent = 9.0 * [a.0, a.1, a.2, b.0, b.1, b.2].iter().cloned().fold(0.0, f64::max);
        let real = dipolar_integral_real_space(&gaussian_q(a, b, disp), centre, extent);
        assert!(((momentum - real) / real).abs() < 1e-4, "{momentum} vs {real}");
        let swapped = dipolar_integral(&cb, &ca, [-disp[0], -disp[1], -disp[2]]).unwrap();
        assert!(((swapped - momentum) / momentum).abs() < 1e-8);
    }
}

const UM: f64 = 1e-6;

/// Two Gaussian wells at `-+sep` along x with transverse oscillator lengths `(sy, sz)`.
fn gaussian_wells(sx: f64, sep: f64, sy: f64, sz: f64) -> ModePair {
    let grid = Grid { x_min: -sep - 12.0 * sx, x_max: sep + 12.0 * sx, n_points: 1201 };
    let x = grid.points();
    let mode = |c: f64| -> Vec<f64> {
        x.iter().map(|x| (-0.5 * ((x - c) / sx).powi(2)).exp() / (PI * sx * sx).powf(0.25)).collect()
    };
    ModePair {
        dx: grid.spacing(),
        psi_l: mode(-sep),
        psi_r: mode(sep),
        x,
        sigma_y: sy,
        sigma_z: sz,
        e_gs: 0.0,
        e_ex: 0.0,
    }
}

fn kernel(u: [f64; 3]) -> f64 {
    let r2 = u[0] * u[0] + u[1] * u[1] + u[2] * u[2];
    (1.0 - 3.0 * u[2] * u[2] / r2) / (4.0 * PI * r2 * r2.sqrt())
}

#[test]
fn couplings_match_monte_carlo() {
    let (sx, sep, sy, sz) = (0.3 * UM, 1.0 * UM, 0.4 * UM, 0.35 * UM);
    let m = gaussian_wells(sx, sep, sy, sz);
    let disp = [0.3 * UM, 2.5 * UM, 0.2 * UM];
    let mass = 39.0 * AMU;
    let c = couplings_dw(&m, &m, disp, mass, c_dd_bohr()).unwrap();

    // Density standard deviations: |psi|^2 has variance sigma^2 / 2 on every axis.
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let normals = [Normal::new(0.0, s * sx).unwrap(), Normal::new(0.0, s * sy).unwrap(), Normal::new(0.0, s * sz).unwrap()];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let samples = 4_000_000;
    let mut acc = [0.0f64; 4];
    for _ in 0..samples {
        let xa = [normals[0].sample(&mut rng), normals[1].sample(&mut rng), normals[2].sample(&mut rng)];
        let xb = [normals[0].sample(&mut rng), normals[1].sample(&mut rng), normals[2].sample(&mut rng)];
        // Pairs (LA,LB), (RA,RB), (RA,LB), (LA,RB) with common random numbers.
        for (k, (ca, cb)) in [(-sep, -sep), (sep, sep), (sep, -sep), (-sep, sep)].iter().enumerate() {
            let u = [xa[0] + ca - xb[0] - cb - disp[0], xa[1] - xb[1] - disp[1], xa[2] - xb[2] - disp[2]];
            acc[k] += kernel(u);
        }
    }
    let d: Vec<f64> = acc.iter().map(|a| a / samples as f64).collect();
    for (mc, exact) in d.iter().zip([c.d_lalb, c.d_rarb, c.d_ralb, c.d_larb]) {
        assert!(((mc - exact) / exact).abs() < 1e-3, "{mc} vs {exact}");
    }
    let k = c_dd_bohr() / HBAR;
    let nloc = k * (d[0] + d[1] - d[2] - d[3]);
    let nz_ab = 0.5 * k * (d[0] - d[1] + d[2] - d[3]);
    let nz_ba = 0.5 * k * (d[0] - d[1] - d[2] + d[3]);
    for (mc, exact) in [(nloc, c.chi_nloc), (nz_ab, c.chi_nz_ab), (nz_ba, c.chi_nz_ba)] {
        assert!(((mc - exact) / exact).abs() < 1e-3, "{mc} vs {exact}");
    }

    // The singular same-well terms are checked against real-space quadrature instead.
    let w = (sx, s * sy, s * sz);
    let w = (s * w.0, w.1, w.2);
    let self_q = gaussian_q(w, w, [0.0; 3]);
    let d_self = dipolar_integral_real_space(&self_q, [0.0; 3], 12.0 * sy);
    assert!(((d_self - c.d_self) / c.d_self).abs() < 1e-4, "{d_self} vs {}", c.d_self);
    let lr_q = gaussian_q(w, w, [2.0 * sep, 0.0, 0.0]);
    let d_lr = dipolar_integral_real_space(&lr_q, [-2.0 * sep, 0.0, 0.0], 12.0 * sy);
    assert!(((d_lr - c.d_lr) / c.d_lr).abs() < 1e-4, "{d_lr} vs {}", c.d_lr);
}

#[test]
fn coupling_symmetries() {
    let m = gaussian_wells(0.3 * UM, 1.0 * UM, 0.4 * UM, 0.35 * UM);
    let mass = 39.0 * AMU;
    let side = couplings_dw(&m, &m, [0.0, 2.5 * UM, 0.0], mass, c_dd_bohr()).unwrap();
    assert!(((side.d_lalb - side.d_rarb) / side.d_lalb).abs() < 1e-8);
    assert!(((side.d_ralb - side.d_larb) / side.d_ralb).abs() < 1e-8);
    assert!(side.chi_nz_ab.abs() < 1e-8 * side.chi_nloc.abs());
    assert!(side.chi_nz_ba.abs() < 1e-8 * side.chi_nloc.abs());

    let none = couplings_dw(&m, &m, [0.0, 2.5 * UM, 0.0], mass, 0.0).unwrap();
    assert_eq!(none.chi_loc, 0.0);
    assert_eq!(none.chi_nloc, 0.0);
    let g = 4.0 * PI * HBAR * HBAR * qudit_net::params::constants::A0 / mass;
    assert!((none.chi_cont(1.0) - g * contact_integral(&m) / HBAR).abs() < 1e-12 * none.chi_cont(1.0));
}

#[test]
fn couplings_converge_under_grid_refinement() {
    let coarse = potassium(400.0, 512);
    let mut fine = coarse.clone();
    fine.grid = coarse.grid.refined();
    let disp = [0.0, 4.0 * UM, 0.0];
    let run = |spec: &DoubleWellSpec| {
        let m = solve_double_well(spec).unwrap();
        couplings_dw(&m, &m, disp, spec.mass, c_dd_bohr()).unwrap()
    };
    let (a, b) = (run(&coarse), run(&fine));
    for (x, y) in [(a.chi_cont_per_a0, b.chi_cont_per_a0), (a.chi_loc, b.chi_loc), (a.chi_nloc, b.chi_nloc)] {
        assert!(((x - y) / y).abs() < 1e-4, "{x} vs {y}");
    }
}
