import pytest

from concurrent_codes import CodeParams, build_table_hash

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


@pytest.fixture
def small():
    """N=3, k=1, L=32: small enough to enumerate everything."""
    params = CodeParams.closed(3, 1)
    return params, build_table_hash(params, 7)


@pytest.fixture
def std_code():
    """8-bit messages, 2 checksum bits, 2048-bit codeword."""
    params = CodeParams.closed(8, 2)
    return params, build_table_hash(params, 12345)
