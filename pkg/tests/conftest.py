"""Shared fixtures: worked-example trace texts and CLI runners."""

from __future__ import annotations

import subprocess
import sys

import pytest

# One grouped block as emitted for a HashMap node table: twelve accesses,
# read/read/write per index over indices 0..3, one thread.
TABLE_BLOCK = """\
[Lscala.collection.mutable.HashMap$Node;@7d8995e 16 12
r 0 1 86 F4C3E8A7
r 0 1 224 F4C3E8A7
w 0 1 226 F4C3E8A7
r 1 1 86 F4C3E8A7
r 1 1 224 F4C3E8A7
w 1 1 226 F4C3E8A7
r 2 1 86 F4C3E8A7
r 2 1 224 F4C3E8A7
w 2 1 226 F4C3E8A7
r 3 1 86 F4C3E8A7
r 3 1 224 F4C3E8A7
w 3 1 226 F4C3E8A7
"""

# Raw log of a small program that fills two int arrays and an Integer array
# via library calls whose writes happen in untraced code: each identity shows
# up as read-only or write-only.
RELAY_LOG = """\
[I@232204a1 w 0 4 1 8 1A0C9142
[I@232204a1 w 1 4 1 8 1A0C9142
[I@232204a1 w 2 4 1 8 1A0C9142
[I@232204a1 w 3 4 1 8 1A0C9142
[I@5cad8086 r 0 4 1 13 1A0C9142
[I@5cad8086 r 1 4 1 13 1A0C9142
[I@5cad8086 r 2 4 1 13 1A0C9142
[I@5cad8086 r 3 4 1 13 1A0C9142
[Ljava.lang.Integer;@6e0be858 w 0 4 1 18 1A0C9142
[Ljava.lang.Integer;@6e0be858 w 1 4 1 18 1A0C9142
[Ljava.lang.Integer;@6e0be858 w 2 4 1 18 1A0C9142
[Ljava.lang.Integer;@6e0be858 w 3 4 1 18 1A0C9142
[I@60e53b93 r 0 4 1 24 1A0C9142
[I@60e53b93 r 1 4 1 24 1A0C9142
[I@60e53b93 r 2 4 1 24 1A0C9142
[I@60e53b93 r 3 4 1 24 1A0C9142
"""

CLASS_MAP = "F4C3E8A7 scala/collection/mutable/HashMap.class\n"


@pytest.fixture
def table_block_text() -> str:
    return TABLE_BLOCK


@pytest.fixture
def relay_log_text() -> str:
    return RELAY_LOG


@pytest.fixture
def class_map_text() -> str:
    return CLASS_MAP


def run_cli(*args: str, check: bool = True, **kwargs) -> subprocess.CompletedProcess:
    """Run the CLI as a subprocess; asserts exit 0 unless check=False."""
    proc = subprocess.run(
        [sys.executable, "-m", "arraytrace", *args],
        capture_output=True,
        text=True,
        **kwargs,
    )
    if check and proc.returncode != 0:
        raise AssertionError(
            f"arraytrace {' '.join(args)} exited {proc.returncode}\n"
            f"stdout: {proc.stdout}\nstderr: {proc.stderr}"
        )
    return proc


def cli_inprocess(*args: str) -> int:
    """Run the CLI in-process (fast path for functional assertions)."""
    from arraytrace.cli import main

    return main(list(args))


@pytest.fixture
def cli():
    return cli_inprocess


@pytest.fixture
def cli_proc():
    return run_cli
