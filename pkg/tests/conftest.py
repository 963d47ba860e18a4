import pytest

from kpower import _backend, fringe_model, kpower_metrics, shot_noise

_USERS = (fringe_model, kpower_metrics, shot_noise)


@pytest.fixture(params=sorted(_backend.BACKENDS))
def each_backend(request, monkeypatch):
    """Run a test once per available kernel backend."""
    mod = _backend.BACKENDS[request.param]
    for user in _USERS:
        monkeypatch.setattr(user, "kernels", mod)
    return request.param
