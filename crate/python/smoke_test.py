#!/usr/bin/env python3
"""Builds the extension module and exercises the bindings end to end."""

import json
import shutil
import subprocess
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def build_extension(tmp: Path) -> Path:
    subprocess.run(
        ["cargo", "build", "-p", "exmarket-py"], cwd=REPO, check=True
    )
    suffix = {"darwin": ".dylib", "win32": ".dll"}.get(sys.platform, ".so")
    prefix = "" if sys.platform == "win32" else "lib"
    built = REPO / "target" / "debug" / f"{prefix}exmarket{suffix}"
    target = tmp / "exmarket.so"
    shutil.copyfile(built, target)
    return target


def remark_market(exmarket):
    return exmarket.Market(
        2,
        [],
        [],
        [[10, 9], [8, 5]],
        [[[0, -2], [-2, 0]], [[0, 2], [2, 0]]],
    )


def main() -> None:
    tmp = Path(tempfile.mkdtemp(prefix="exmarket-smoke-"))
    build_extension(tmp)
    sys.path.insert(0, str(tmp))
    import exmarket

    market = remark_market(exmarket)
    assert market.num_agents() == 2
    assert market.utility([0, 1], 0) == 10
    assert market.potential([0, 1]) == 30

    stable, witness = market.check_stable([0, 1], 2)
    assert not stable and witness == [(0, 1), (1, 0)], (stable, witness)
    stable, witness = market.check_stable([1, 0], 2)
    assert stable and witness is None

    assert market.find_2_stable() == [1, 0]
    assert market.find_2_stable(pivot="first", init="random", seed=7) == [1, 0]
    assert market.solve_core_stable() == [1, 0]

    # JSON round trip preserves behavior.
    doc = json.loads(market.to_json())
    assert doc["kind"] == "market" and doc["version"] == 1
    again = exmarket.Market.from_json(market.to_json())
    assert again.potential([1, 0]) == 34

    perm, total = exmarket.max_weight_perfect_matching([[11, 10], [9, 6]])
    assert (perm, total) == ([1, 0], 19), (perm, total)

    # Invalid inputs surface as ValueError.
    for bad_call in (
        lambda: market.potential([0, 0]),
        lambda: market.check_stable([0, 1], 99),
        lambda: exmarket.Market(0, [], [], [], []),
    ):
        try:
            bad_call()
        except ValueError:
            pass
        else:
            raise AssertionError("expected ValueError")

    print("smoke test passed")


if __name__ == "__main__":
    main()
