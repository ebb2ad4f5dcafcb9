use nalgebra::DMatrix;
use qsep::linalg::{log_power_sum, power_sum};
use qsep::{HermitianOperator, C64};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

// Characteristic polynomial by Faddeev-LeVerrier, coefficients c[0..=n] of
// det(tI - A) = Σ c[k] t^k. Exact in rational arithmetic, well conditioned enough
// in f64 for small well-separated spectra.
fn char_poly(a: &DMatrix<C64>) -> Vec<f64> {
    let n = a.nrows();
    let mut c = vec![0.0; n + 1];
    c[n] = 1.0;
    let mut m = DMatrix::<C64>::zeros(n, n);
    for k in 1..=n {
        m = a * &m + DMatrix::<C64>::identity(n, n).scale(c[n - k + 1]);
        let am = a * &m;
        c[n - k] = -am.trace().re / k as f64;
    }
    c
}

fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck)
}

fn poly_roots(c: &[f64], bound: f64) -> Vec<f64> {
    let steps = 200_000;
    let h = 2.0 * bound / steps as f64;
    let mut roots = Vec::new();
    let mut lo = -bound;
    let mut flo = horner(c, lo);
    for i in 1..=steps {
        let hi = -bound + i as f64 * h;
        let fhi = horner(c, hi);
        if flo == 0.0 {
            roots.push(lo);
        } else if flo * fhi < 0.0 {
            let (mut a, mut b, mut fa) = (lo, hi, flo);
            for _ in 0..200 {
                let mid = 0.5 * (a + b);
                let fm = horner(c, mid);
                if fm * fa > 0.0 {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            roots.push(0.5 * (a + b));
        }
        lo = hi;
        flo = fhi;
    }
    roots.sort_by(|a, b| b.total_cmp(a));
    roots
}

#[test]
fn eig_matches_characteristic_polynomial_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for trial in 0..5 {
        let g = DMatrix::from_fn(6, 6, |_, _| {
            C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        let h = (&g + g.adjoint()).scale(0.5);
        let op = HermitianOperator::new(vec![6], h.clone()).unwrap();
        let got = op.eig().values;
        let bound = h.norm() + 1.0;
        let expect = poly_roots(&char_poly(&h), bound);
        assert_eq!(expect.len(), 6, "trial {trial}: roots {expect:?}");
        for (a, b) in got.iter().zip(&expect) {
            assert!((a - b).abs() < 1e-9, "trial {trial}: {a} vs {b}");
        }
    }
}

#[test]
fn eigenvectors_reconstruct_the_operator() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = DMatrix::from_fn(5, 5, |_, _| C64::new(rng.random(), rng.random()));
    let h = (&g + g.adjoint()).scale(0.5);
    let eigs = HermitianOperator::new(vec![5], h.clone()).unwrap().eig();
    assert!((eigs.reconstruct().unwrap() - h).norm() < 1e-12);
}

// Double-double arithmetic: value = hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Clone, Copy)]
struct Dd(f64, f64);

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd(p, a.mul_add(b, -p))
}

fn quick_two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    Dd(s, b - (s - a))
}

fn dd_mul(x: Dd, y: Dd) -> Dd {
    let p = two_prod(x.0, y.0);
    quick_two_sum(p.0, p.1 + (x.0 * y.1 + x.1 * y.0))
}

fn dd_pow(base: f64, mut e: u32) -> Dd {
    let mut acc = Dd(1.0, 0.0);
    let mut b = Dd(base, 0.0);
    while e > 0 {
        if e & 1 == 1 {
            acc = dd_mul(acc, b);
        }
        b = dd_mul(b, b);
        e >>= 1;
    }
    acc
}

#[test]
fn large_order_power_sum_against_extended_precision() {
    let oracle = dd_pow(1.02, 1000);
    // 0.3^1000 underflows to zero and contributes nothing at this precision
    let expect = oracle.0 + oracle.1;
    let got = power_sum(&[1.02, 0.3], 1000.0).unwrap();
    assert!(((got - expect) / expect).abs() < 1e-9, "{got} vs {expect}");
    let log = log_power_sum(&[1.02, 0.3], 1000.0).unwrap();
    assert!((log - 1000.0 * 1.02f64.ln()).abs() < 1e-12);
}

#[test]
fn huge_orders_stay_finite_in_log_form() {
    let log = log_power_sum(&[2.5, 1.0, 0.5], 1e6).unwrap();
    assert!(log.is_finite());
    assert!((log - 1e6 * 2.5f64.ln()).abs() < 1e-6);
    assert!(power_sum(&[2.5], 1e6).unwrap().is_infinite());
}
