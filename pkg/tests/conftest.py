import pytest
from hypothesis import HealthCheck, settings

from partcache import SystemConfig, zipf_popularity

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


def make_cfg(ratio=1.0, n_files=5, cache_size=2, sic_capability=3, alpha=4.0):
    """Reference five-file system; file size set through the size ratio."""
    return SystemConfig(
        n_files=n_files,
        cache_size=cache_size,
        sic_capability=sic_capability,
        path_loss_exp=alpha,
        bandwidth=1.0e7,
        slot_duration=1.0e-3,
        file_size=ratio * 1.0e4,
        bs_density=1.0e-4,
    )


@pytest.fixture
def cfg5():
    return make_cfg()


@pytest.fixture
def pop5():
    return zipf_popularity(5, 1.0)


@pytest.fixture(scope="session")
def criterion_report(request):
    """Collect one verdict line per acceptance criterion for the run summary."""
    lines = getattr(request.config, "_criterion_lines", None)
    if lines is None:
        lines = request.config._criterion_lines = []
    return lines.append


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_criterion_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
