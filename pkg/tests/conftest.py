import math

import pytest

from isac_tradeoff import _backend
from isac_tradeoff.channel import CommLink, SlotConfig
from isac_tradeoff.metrics import MetricConfig
from isac_tradeoff.sensing import SenseLink

# reference simulation set-up
L = 14
BANDWIDTH = 200e6
SIGMA1_SQ = 2.0


def db(x):
    return 10.0 ** (x / 10.0)


def ref_slot(L_p=1, B=BANDWIDTH):
    return SlotConfig(L, L_p, B)


def ref_comm(snr_db=10.0, gamma_d_db=None):
    g = db(snr_db)
    return CommLink(SIGMA1_SQ, g, db(gamma_d_db) if gamma_d_db is not None else g)


def ref_sense(snr_db=10.0, d=100.0, A_s=3.0, sigma2_sq=1.0, **kw):
    return SenseLink(A_s=A_s, sigma2_sq=sigma2_sq, s_rcs=100.0, d=d,
                     B_rms=BANDWIDTH / math.sqrt(12.0), gamma_ps=db(snr_db), **kw)


@pytest.fixture
def metric():
    return MetricConfig(kappa=1.0, eta=0.5, u_c_th=0.2, u_d_th=0.2)


@pytest.fixture(params=_backend.available())
def backend(request):
    previous = _backend.set_backend(request.param)
    yield request.param
    _backend.set_backend(previous)


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[num]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {num}. {title}: {detail}")
