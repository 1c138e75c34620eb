import pytest

from gvmix.wfamily import lp, rp


@pytest.fixture(params=["rp0.3", "rp0.5", "rp0.7", "rp1", "lp1m1", "lp1m0.5", "lp0.7m1", "lp0.5p0.3"])
def family(request):
    return {
        "rp0.3": rp(0.3),
        "rp0.5": rp(0.5),
        "rp0.7": rp(0.7),
        "rp1": rp(1.0),
        "lp1m1": lp(1.0, -1.0),
        "lp1m0.5": lp(1.0, -0.5),
        "lp0.7m1": lp(0.7, -1.0),
        "lp0.5p0.3": lp(0.5, 0.3),
    }[request.param]
