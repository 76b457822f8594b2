#
import pytest

def pytest_report_header(config):
    return "FTL simulator test runner: ftlsim"

def pytest_addoption(parser):
    parser.addoption("--battery-size", action="store", type=int, default=4,
        help="Number of seeds in the strategy equivalence battery")

@pytest.fixture
def battery_size(request):
    return request.config.getoption("--battery-size")
