import numpy as np
import pytest

from statsad.types import AudioClip


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def white_clip(seconds: float, sr: int = 8000, seed: int = 0, scale: float = 1.0) -> AudioClip:
    x = np.random.default_rng(seed).standard_normal(int(round(seconds * sr))) * scale
    return AudioClip(x, sr)


def tone(freq: float, seconds: float, sr: int = 8000, amp: float = 1.0) -> np.ndarray:
    t = np.arange(int(round(seconds * sr))) / sr
    return amp * np.sin(2 * np.pi * freq * t)


_ACCEPTANCE_KEY = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE_KEY] = []


@pytest.fixture
def acceptance(request):
    """Call with ``(number, title, ok, detail)``; prints a verdict line and asserts ``ok``."""
    lines = request.config.stash[_ACCEPTANCE_KEY]

    def report(number: int, title: str, ok: bool, detail: str) -> None:
        line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {title}: {detail}"
        lines.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE_KEY, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
