//! Laguerre values against exact rational arithmetic.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use twistrad::quantum::laguerre;

fn binomial(n: u32, k: u32) -> BigInt {
    (0..k).fold(BigInt::one(), |acc, i| acc * BigInt::from(n - i) / BigInt::from(i + 1))
}

/// `L_n^a(x) = sum_k (-1)^k C(n + a, n - k) x^k / k!`.
fn exact(n: u32, a: u32, x: &BigRational) -> BigRational {
    let mut sum = BigRational::zero();
    let mut power = BigRational::one();
    let mut fact = BigInt::one();
    for k in 0..=n {
        if k > 0 {
            power *= x;
            fact *= BigInt::from(k);
        }
        let term = BigRational::from_integer(binomial(n + a, n - k)) * &power / BigRational::from_integer(fact.clone());
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    sum
}

#[test]
fn five_three_at_five_halves() {
    let x = BigRational::new(5.into(), 2.into());
    let e = exact(5, 3, &x);
    assert_eq!(e, BigRational::new((-3617).into(), 768.into()));
    assert!((laguerre(5, 3, 2.5) - e.to_f64().unwrap()).abs() < 1e-13);
}

#[test]
fn grid_of_orders_and_arguments() {
    for (num, den) in [(1, 3), (5, 2), (7, 1), (31, 4)] {
        let x = BigRational::new(BigInt::from(num), BigInt::from(den));
        let xf = num as f64 / den as f64;
        for n in 0..=20 {
            for a in 0..=6 {
                let e = exact(n, a, &x).to_f64().unwrap();
                let v = laguerre(n, a, xf);
                let scale = e.abs().max(1.0);
                assert!((v - e).abs() <= 1e-11 * scale, "L_{n}^{a}({xf}) = {v}, exact {e}");
            }
        }
    }
}
