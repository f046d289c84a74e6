from hypothesis import settings

import _util

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def pytest_terminal_summary(terminalreporter):
    if _util.ACCEPTANCE:
        terminalreporter.section("acceptance")
        for line in _util.ACCEPTANCE:
            terminalreporter.write_line(line)
