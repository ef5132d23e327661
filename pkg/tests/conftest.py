import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from dotless.script import ALPHABET  # noqa: E402

DOTTED = sorted(ALPHABET.dotted_letters)
DOTLESS = sorted(ALPHABET.dotless_letters)

_ACCEPTANCE_KEY = pytest.StashKey[dict]()

arabic_word = st.text(alphabet=DOTTED, min_size=1, max_size=9)
arabic_text = st.lists(arabic_word, min_size=0, max_size=8).map(" ".join)
mixed_word = st.text(alphabet=DOTTED + DOTLESS, min_size=1, max_size=9)
mixed_text = st.lists(mixed_word, min_size=0, max_size=8).map(" ".join)


@pytest.fixture
def acceptance(request):
    """Record one criterion line: ``acceptance(number, ok, detail)``."""
    results = request.config.stash.setdefault(_ACCEPTANCE_KEY, {})

    def record(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        results[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_ACCEPTANCE_KEY, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
