//! q-integers, q-factorials and q-binomials in both normalizations.

use super::qrat::QRat;
use super::scalar::Scalar;

/// Symmetric q-integer [t] = (q^t - q^-t)/(q - q^-1).
pub fn qint_sym(t: i64) -> QRat {
    let num = QRat::laurent(&[(t, 1), (-t, -1)]);
    let den = QRat::laurent(&[(1, 1), (-1, -1)]);
    num.mul(&den.try_inv().unwrap())
}

/// Non-symmetric q-integer (t) = (q^{2t} - 1)/(q^2 - 1).
pub fn qint(t: i64) -> QRat {
    let num = QRat::laurent(&[(2 * t, 1), (0, -1)]);
    let den = QRat::laurent(&[(2, 1), (0, -1)]);
    num.mul(&den.try_inv().unwrap())
}

/// (n)! = (1)(2)...(n).
pub fn qfact(n: u32) -> QRat {
    let mut r = QRat::one();
    for m in 1..=n as i64 {
        r = r.mul(&qint(m));
    }
    r
}

/// Symmetric [n]! = [1][2]...[n].
pub fn qfact_sym(n: u32) -> QRat {
    let mut r = QRat::one();
    for m in 1..=n as i64 {
        r = r.mul(&qint_sym(m));
    }
    r
}

/// Symmetric q-binomial [t; n] = [t][t-1]...[t-n+1]/[n]!.
pub fn qbinom_sym(t: i64, n: u32) -> QRat {
    let mut r = QRat::one();
    for m in 0..n as i64 {
        r = r.mul(&qint_sym(t - m));
    }
    r.mul(&qfact_sym(n).try_inv().unwrap())
}

/// [s] evaluated at q^k, i.e. (q^{ks} - q^{-ks})/(q^k - q^{-k}).
pub fn qint_sym_at_pow(s: i64, k: i64) -> QRat {
    let num = QRat::laurent(&[(k * s, 1), (-k * s, -1)]);
    let den = QRat::laurent(&[(k, 1), (-k, -1)]);
    num.mul(&den.try_inv().unwrap())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(qint_sym(1), QRat::one());
        assert_eq!(qint_sym(2), QRat::laurent(&[(1, 1), (-1, 1)]));
        assert_eq!(qint_sym(3), QRat::laurent(&[(2, 1), (0, 1), (-2, 1)]));
        assert_eq!(qint_sym(-2), qint_sym(2).neg());
        assert_eq!(qint(1), QRat::one());
        assert_eq!(qint(2), QRat::laurent(&[(2, 1), (0, 1)]));
        assert_eq!(qint(0), QRat::zero());
    }

    #[test]
    fn factorials_and_binomials() {
        assert_eq!(qfact(3), qint(2).mul(&qint(3)));
        // [4;2] = [4][3]/([2][1]) = [3] + [2]^2 - ... spot check against direct product
        let b = qbinom_sym(4, 2);
        let direct = qint_sym(4)
            .mul(&qint_sym(3))
            .mul(&qfact_sym(2).try_inv().unwrap());
        assert_eq!(b, direct);
        // q-binomials of integers are Laurent polynomials
        assert!(b.is_polynomial());
    }

    #[test]
    fn symmetric_vs_nonsymmetric() {
        // (t) = q^{t-1} [t]
        for t in 1..6 {
            assert_eq!(qint(t), QRat::q_pow(t - 1).mul(&qint_sym(t)));
        }
    }

    #[test]
    fn evaluated_at_powers() {
        // [2] at q^s equals q^s + q^-s
        assert_eq!(qint_sym_at_pow(2, 3), QRat::laurent(&[(3, 1), (-3, 1)]));
        assert_eq!(qint_sym_at_pow(3, 1), qint_sym(3));
    }
}
