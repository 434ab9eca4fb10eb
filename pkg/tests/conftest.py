import pytest

_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.stash[_KEY] = {}


@pytest.fixture(scope="session")
def acceptance_log(request):
    return request.config.stash[_KEY]


def pytest_terminal_summary(terminalreporter, config):
    log = config.stash.get(_KEY, {})
    if not log:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for key in sorted(log, key=lambda k: (isinstance(k, str), k)):
        terminalreporter.write_line(log[key])
