import mpmath as mp
import pytest

from conftest import mpv
from rieszlab.arith import PrecisionConfig
from rieszlab.errors import PoleError
from rieszlab.zeta import (
    digamma,
    gamma,
    hardy_z,
    inv_zeta_prime_trivial,
    log_gamma,
    zeta,
    zeta_int,
    zeta_prime,
    zeta_real,
)

CFG = PrecisionConfig()


def hp(x):
    with mp.workprec(256):
        return mp.mpf(x)


def close(a, b, rel=1e-60):
    with mp.workprec(256):
        return abs(a - b) <= rel * max(abs(b), 1)


@pytest.mark.parametrize("key, s", [("2", 2), ("3", 3), ("-3.5", hp("-3.5"))])
def test_zeta_real_points(frozen, key, s):
    assert close(zeta(s, CFG), mpv(frozen["zeta"][key]), 1e-38)


@pytest.mark.parametrize("key, s", [("0.5+14i", (0.5, 14)), ("3+4i", (3, 4)), ("0.2-30i", (0.2, -30))])
def test_zeta_complex_points(frozen, key, s):
    with mp.workprec(256):
        z = zeta(mp.mpc(*s), CFG)
    assert close(z, mpv(frozen["zeta"][key]), 1e-38)


def test_zeta_pole():
    with pytest.raises(PoleError):
        zeta(1, CFG)


def test_zeta_trivial_zero_and_zero_point():
    assert abs(zeta(-4, CFG)) < mp.mpf(10) ** -60
    assert close(zeta(0, CFG), mp.mpf(-0.5))


def test_zeta_real_and_int_cache():
    assert zeta_real(2) == zeta_int(2)
    with mp.workprec(256):
        ref = mp.pi**4 / 90
    assert close(zeta_int(4, CFG), ref)


@pytest.mark.parametrize("key, s", [("3+4i", (3, 4)), ("0.75-7i", (0.75, -7))])
def test_log_gamma(frozen, key, s):
    with mp.workprec(256):
        v = log_gamma(mp.mpc(*s), CFG)
    assert close(v, mpv(frozen["loggamma"][key]), 1e-38)


def test_log_gamma_real_and_gamma():
    assert close(log_gamma(hp("0.3"), CFG), mpv(frozen_value("loggamma", "0.3")), 1e-38)
    assert close(gamma(5, CFG), mp.mpf(24))
    with pytest.raises(PoleError):
        gamma(-2, CFG)


def frozen_value(group, key):
    from conftest import FROZEN

    return FROZEN[group][key]


@pytest.mark.parametrize("key", ["2.5", "0.1"])
def test_digamma(frozen, key):
    assert close(digamma(hp(key), CFG), mpv(frozen["digamma"][key]), 1e-38)


def test_zeta_prime_at_first_zeros(frozen):
    for z in frozen["zeros"][:3]:
        with mp.workprec(300):
            rho = mp.mpc(0.5, mp.mpf(z["gamma"]))
        d = zeta_prime(rho, CFG)
        assert close(d, mpv(z["zeta_prime"]), 1e-36)


def test_first_zero_derivative_modulus(frozen):
    # |zeta'(rho_1)| = 0.7932; 0.7832 is its real part
    d = mpv(frozen["zeros"][0]["zeta_prime"])
    assert abs(d) == pytest.approx(0.79316, abs=1e-5)
    assert mp.re(d) == pytest.approx(0.78330, abs=1e-5)


@pytest.mark.parametrize("n", range(1, 6))
def test_inv_zeta_prime_trivial(frozen, n):
    ref = mpv(frozen["zeta_prime_trivial"][str(n)])
    assert close(inv_zeta_prime_trivial(n, CFG) * ref, mp.mpf(1), 1e-38)


def test_inv_zeta_prime_trivial_domain():
    with pytest.raises(ValueError):
        inv_zeta_prime_trivial(0)


def test_hardy_z_real_and_changes_sign_at_first_zero(frozen):
    g = float(mpv(frozen["zeros"][0]["gamma"]))
    lo, hi = hardy_z(g - 0.01, CFG), hardy_z(g + 0.01, CFG)
    assert mp.im(mp.mpmathify(lo)) == 0
    assert lo * hi < 0
    assert abs(hardy_z(10.0, CFG)) == pytest.approx(abs(complex(mp.zeta(mp.mpc(0.5, 10)))), rel=1e-12)
